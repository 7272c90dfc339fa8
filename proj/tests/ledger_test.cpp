#include <gtest/gtest.h>

#include "hybridq/errors.hpp"
#include "hybridq/ledger.hpp"

using namespace hybridq;

TEST(Ledger, NewLedgerIsEmpty) {
  const QueryLedger l = new_ledger(5);
  EXPECT_EQ(l.total(), 0);
  EXPECT_EQ(summary(l), (LedgerSummary{0, 0, 0}));
  EXPECT_NO_THROW(new_ledger(1));
  EXPECT_THROW(new_ledger(0), InvalidBudget);
}

TEST(Ledger, RecordsAccumulate) {
  QueryLedger l = record_circuit(record_circuit(new_ledger(5), 3), 4);
  EXPECT_EQ(l.total(), 7);
  EXPECT_EQ(l.max_coherent(), 4);
}

TEST(Ledger, DepthLimitIsInclusive) {
  QueryLedger l(5);
  EXPECT_NO_THROW(l.record(5));
  EXPECT_THROW(l.record(6), DepthExceeded);
  EXPECT_EQ(l.summary(), (LedgerSummary{5, 5, 1}));
}

TEST(Ledger, RejectedRecordLeavesLedgerUnchanged) {
  QueryLedger l(4);
  l.record(2, 3);
  const auto before = l.summary();
  EXPECT_THROW(l.record(9, 10), DepthExceeded);
  EXPECT_THROW(l.record(0), InvalidInput);
  EXPECT_EQ(l.summary(), before);
  EXPECT_EQ(l.circuit_log(), (std::vector<std::int64_t>{2, 2, 2}));
}

TEST(Ledger, SummaryExamples) {
  QueryLedger l(7);
  l.record(2, 3);
  EXPECT_EQ(l.summary(), (LedgerSummary{6, 2, 3}));
  QueryLedger m(7);
  m.record(1);
  m.record(7);
  EXPECT_EQ(m.summary(), (LedgerSummary{8, 7, 2}));
}

TEST(Ledger, TotalIsMonotoneAndMatchesLog) {
  QueryLedger l(10);
  std::int64_t last = 0;
  for (int q = 1; q <= 10; ++q) {
    l.record(q, q % 3 + 1);
    EXPECT_GE(l.total(), last);
    last = l.total();
    std::int64_t sum = 0;
    for (auto c : l.circuit_log()) sum += c;
    EXPECT_EQ(sum, l.total());
    EXPECT_LE(l.max_coherent(), l.depth_limit());
  }
}

TEST(Ledger, MergeAddsRunsAndRequiresSameLimit) {
  QueryLedger a(6), b(6), c(5);
  a.record(3);
  b.record(6, 2);
  a.merge(b);
  EXPECT_EQ(a.summary(), (LedgerSummary{15, 6, 3}));
  EXPECT_THROW(a.merge(c), InvalidInput);
}
