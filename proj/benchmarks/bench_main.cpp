#include <benchmark/benchmark.h>

#include "hybridq/block_encoding.hpp"
#include "hybridq/chebyshev.hpp"
#include "hybridq/nand.hpp"
#include "hybridq/symmetric.hpp"
#include "hybridq/threshold.hpp"

using namespace hybridq;

namespace {

OracleInput weight_input(int n, int w) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < w; ++i) bits[i] = 1;
  return OracleInput(bits);
}

void BM_ErfPoly(benchmark::State& st) {
  const double kappa = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(erf_poly(kappa, 0.0, 1e-3));
}
BENCHMARK(BM_ErfPoly)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_StepPoly(benchmark::State& st) {
  const StepSpec spec{1.0 / static_cast<double>(st.range(0)), 0.125, 0.3};
  for (auto _ : st) benchmark::DoNotOptimize(step_poly(spec));
  st.counters["degree"] = step_poly(spec).degree();
}
BENCHMARK(BM_StepPoly)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ApplyQsvt(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const BlockEncoding be = threshold_block_encoding(weight_input(n, n / 4));
  const BoundedPolynomial p = step_poly({0.05, 0.125, 0.4});
  for (auto _ : st) benchmark::DoNotOptimize(apply_qsvt(be, p));
}
BENCHMARK(BM_ApplyQsvt)->Arg(16)->Arg(256)->Arg(1024);

void BM_ThresholdInterpolated(benchmark::State& st) {
  const ThresholdInstance inst{weight_input(256, 5), 4};
  std::uint64_t seed = 0;
  for (auto _ : st) {
    QueryLedger ledger(st.range(0));
    benchmark::DoNotOptimize(solve_threshold_interpolated(inst, ledger, ++seed));
  }
}
BENCHMARK(BM_ThresholdInterpolated)->Arg(8)->Arg(32);

void BM_ThresholdParallel(benchmark::State& st) {
  const ThresholdInstance inst{weight_input(256, 9), 8};
  std::uint64_t seed = 0;
  for (auto _ : st) {
    QueryLedger ledger(st.range(0));
    benchmark::DoNotOptimize(solve_threshold_parallel(inst, ledger, ++seed));
  }
}
BENCHMARK(BM_ThresholdParallel)->Arg(8)->Arg(32);

void BM_NandPlan(benchmark::State& st) {
  // Plans are memoized, so vary the limit to time real construction.
  const int depth = static_cast<int>(st.range(0));
  std::int64_t d = 1000;
  for (auto _ : st) benchmark::DoNotOptimize(plan_nand_interpolated(depth, ++d));
}
BENCHMARK(BM_NandPlan)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond)->Iterations(5);

void BM_NandInterpolated(benchmark::State& st) {
  const NandTree tree = build_balanced_tree(static_cast<int>(st.range(0)));
  const Bits x(static_cast<std::size_t>(tree.leaves()), 0);
  std::uint64_t seed = 0;
  for (auto _ : st) {
    QueryLedger ledger(64);
    benchmark::DoNotOptimize(solve_nand_interpolated(tree, x, ledger, ++seed));
  }
}
BENCHMARK(BM_NandInterpolated)->Arg(2)->Arg(3)->Arg(4);

void BM_Symmetric(benchmark::State& st) {
  const SymmetricFunction f = SymmetricFunction::majority(16);
  const OracleInput x = weight_input(16, 7);
  std::uint64_t seed = 0;
  for (auto _ : st) {
    QueryLedger ledger(64);
    benchmark::DoNotOptimize(solve_symmetric(f, x, ledger, ++seed));
  }
}
BENCHMARK(BM_Symmetric);

}  // namespace

BENCHMARK_MAIN();
