#pragma once

#include <cstdint>
#include <vector>

namespace hybridq {

struct LedgerSummary {
  std::int64_t total = 0;
  std::int64_t max_coherent = 0;
  std::int64_t circuits = 0;

  bool operator==(const LedgerSummary&) const = default;
};

// Hybrid-model query accounting: every circuit declares its coherent query
// count, which must not exceed the depth limit D (inclusive).
class QueryLedger {
 public:
  explicit QueryLedger(std::int64_t depth_limit);

  std::int64_t depth_limit() const { return depth_limit_; }
  std::int64_t total() const { return total_; }
  std::int64_t max_coherent() const { return max_coherent_; }
  std::int64_t circuits() const { return circuits_; }
  LedgerSummary summary() const { return {total_, max_coherent_, circuits_}; }

  // Records `count` circuits of `coherent_queries` each. Throws DepthExceeded
  // and leaves the ledger untouched when the cost is over the limit.
  void record(std::int64_t coherent_queries, std::int64_t count = 1);

  // Appends every run of `other`; both ledgers must share the depth limit.
  void merge(const QueryLedger& other);

  // Expanded per-circuit log. Runs are stored compressed, so this can be big.
  std::vector<std::int64_t> circuit_log() const;

  struct Run {
    std::int64_t cost;
    std::int64_t count;
  };
  const std::vector<Run>& runs() const { return runs_; }

 private:
  std::int64_t depth_limit_;
  std::int64_t total_ = 0;
  std::int64_t max_coherent_ = 0;
  std::int64_t circuits_ = 0;
  std::vector<Run> runs_;
};

QueryLedger new_ledger(std::int64_t depth_limit);
QueryLedger record_circuit(QueryLedger ledger, std::int64_t coherent_queries);
LedgerSummary summary(const QueryLedger& ledger);

}  // namespace hybridq
