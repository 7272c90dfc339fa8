#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hybridq/block_encoding.hpp"
#include "hybridq/chebyshev.hpp"
#include "hybridq/ledger.hpp"
#include "hybridq/solver.hpp"

namespace hybridq {

// Threshold_k(x) = 1 iff |x| > k.
struct ThresholdInstance {
  OracleInput input;
  int k = 0;
};

int threshold_value(const OracleInput& input, int k);

// Instances with k > N/2 run as 1 − Threshold_{N−k−1}(¬x) through the
// complement encoding; k >= N is identically 0.
struct ThresholdRoute {
  bool trivial = false;
  bool complement = false;
  int k_eff = 0;
};
ThresholdRoute threshold_route(int n_items, int k);

struct InterpolationPlan {
  ThresholdRoute route;
  bool classical = false;
  std::string family;  // full-step | erf-budget | damped | classical | trivial
  double mu = 0.0;
  double delta = 0.0;
  BoundedPolynomial poly;
  double low = 0.0;   // max |P| over singular values at or below the threshold
  double high = 0.0;  // min P over singular values above it
  double decision = 0.0;  // flag frequency above which the answer is 1
  std::int64_t shots = 0;
  std::int64_t circuit_cost = 0;
  std::int64_t expected_total = 0;
};

// Cheapest certified plan for (N, k) under depth D; memoized.
std::shared_ptr<const InterpolationPlan> plan_threshold_interpolation(int n_items, int k,
                                                                      std::int64_t depth,
                                                                      const SolverOptions& opts = {});

// Exact flag probability the interpolated solver samples for this instance.
double interpolated_flag_probability(const ThresholdInstance& inst, std::int64_t depth,
                                     const SolverOptions& opts = {});

Outcome solve_threshold_interpolated(const ThresholdInstance& inst, QueryLedger& ledger,
                                     std::uint64_t seed, const SolverOptions& opts = {});

struct PartitionPlan {
  std::vector<std::vector<int>> bins;
  std::uint64_t seed = 0;
};

// Seeded uniform permutation of 0..N-1 cut into p contiguous chunks.
PartitionPlan random_partition(int n_items, int bins, std::uint64_t seed);

struct ParallelPlan {
  ThresholdRoute route;
  bool classical = false;
  int bins = 1;
  int bin_size = 1;
  int grover_steps = 0;
  int repetitions = 0;
  int design_load = 0;        // max ones per bin the plan recovers exactly
  double load_failure = 0.0;  // P(some bin exceeds the design load) at |x| = k + 1
  double bin_failure = 0.0;   // per-bin failure of the median estimate
  bool many_ones = false;     // k >= p log p regime
  std::int64_t expected_total = 0;
};

std::shared_ptr<const ParallelPlan> plan_threshold_parallel(int n_items, int k, std::int64_t depth,
                                                            const SolverOptions& opts = {});

Outcome solve_threshold_parallel(const ThresholdInstance& inst, QueryLedger& ledger,
                                 std::uint64_t seed, const SolverOptions& opts = {});

// Reads every bit once (N circuits of cost 1).
Outcome classical_threshold(const OracleInput& input, int k, QueryLedger& ledger);

}  // namespace hybridq
