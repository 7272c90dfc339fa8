#include "hybridq/ledger.hpp"

#include <algorithm>
#include <string>

#include "hybridq/errors.hpp"

namespace hybridq {

QueryLedger::QueryLedger(std::int64_t depth_limit) : depth_limit_(depth_limit) {
  if (depth_limit < 1) {
    throw InvalidBudget("depth limit must be >= 1, got " + std::to_string(depth_limit));
  }
}

void QueryLedger::record(std::int64_t coherent_queries, std::int64_t count) {
  if (coherent_queries < 1) {
    throw InvalidInput("circuit must make at least one query");
  }
  if (coherent_queries > depth_limit_) {
    throw DepthExceeded("circuit of " + std::to_string(coherent_queries) +
                        " coherent queries exceeds depth limit " + std::to_string(depth_limit_));
  }
  if (count < 0) throw InvalidInput("negative circuit count");
  if (count == 0) return;
  if (!runs_.empty() && runs_.back().cost == coherent_queries) {
    runs_.back().count += count;
  } else {
    runs_.push_back({coherent_queries, count});
  }
  total_ += coherent_queries * count;
  circuits_ += count;
  max_coherent_ = std::max(max_coherent_, coherent_queries);
}

void QueryLedger::merge(const QueryLedger& other) {
  if (other.depth_limit_ != depth_limit_) {
    throw InvalidInput("cannot merge ledgers with different depth limits");
  }
  for (const Run& r : other.runs_) record(r.cost, r.count);
}

std::vector<std::int64_t> QueryLedger::circuit_log() const {
  std::vector<std::int64_t> log;
  log.reserve(static_cast<std::size_t>(circuits_));
  for (const Run& r : runs_) log.insert(log.end(), static_cast<std::size_t>(r.count), r.cost);
  return log;
}

QueryLedger new_ledger(std::int64_t depth_limit) { return QueryLedger(depth_limit); }

QueryLedger record_circuit(QueryLedger ledger, std::int64_t coherent_queries) {
  ledger.record(coherent_queries);
  return ledger;
}

LedgerSummary summary(const QueryLedger& ledger) { return ledger.summary(); }

}  // namespace hybridq
