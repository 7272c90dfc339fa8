#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hybridq/chebyshev.hpp"
#include "hybridq/ledger.hpp"
#include "hybridq/solver.hpp"

namespace hybridq {

using Bits = std::vector<std::uint8_t>;

inline constexpr int kMaxNandDepth = 10;

// Perfectly balanced NAND formula with N = 2^d leaves, stored in heap order:
// node 1 is the root r, nodes 2..N-1 are internal, N..2N-1 are leaves. Index 0
// is the tail node r' and index 2N the tail end r''.
struct NandTree {
  int depth = 0;
  std::vector<int> leaf_order;     // leaf position -> input index
  int input_count = 0;
  std::vector<int> subtree_sizes;  // s_v for heap nodes 1..2N-1 (index 0 unused)

  int leaves() const { return 1 << depth; }
  int node_count() const { return 2 * leaves() + 1; }
  static constexpr int r_prime() { return 0; }
  int r_double_prime() const { return 2 * leaves(); }

  std::string to_json() const;
  static NandTree from_json(const std::string& text);
};

// Identity leaf order unless `leaf_order` is given; it may repeat inputs.
NandTree build_balanced_tree(int depth, std::vector<int> leaf_order = {});

int evaluate_classical(const NandTree& tree, const Bits& x);

// Weighted adjacency: parent-child weight (s_v / s_p)^{1/4}, leaf edges removed
// where the leaf reads 1, root-r' weight 1, r'-r'' weight 1 / (√2 N^{1/4}).
Eigen::MatrixXd adjacency_matrix(const NandTree& tree, const Bits& x);

struct SpectralCertificate {
  int phi_value = 0;
  double zero_overlap = 0.0;              // |Π_0 |r''⟩| when phi = 0
  double min_supported_eigenvalue = 0.0;  // min |λ| over eigenspaces touching r'' when phi = 1
};

SpectralCertificate spectral_certificate(const Eigen::MatrixXd& H, int phi);

// Gap of H/3 beyond which every eigenspace touching r'' lies when Φ = 1.
double nand_spectral_gap(int n_leaves);

struct NandPlan {
  int depth = 0;
  bool classical = false;
  bool exact_classes = false;  // bounds taken over every input class, not the certified ones
  std::string family;          // full-window | interpolated | damped | classical
  BoundedPolynomial poly;
  double yes_low = 0.0;    // smallest P[yes] when Φ = 0
  double yes_high = 0.0;   // largest P[yes] when Φ = 1
  double decision = 0.0;   // flag frequency above which the answer is 0
  double stop_leakage = 0.0;  // max |Q| on the stop band
  std::int64_t shots = 0;
  std::int64_t circuit_cost = 0;
  std::int64_t expected_total = 0;
};

// Cheapest separating plan for a depth-d tree under depth limit D; memoized.
std::shared_ptr<const NandPlan> plan_nand_interpolated(int depth, std::int64_t depth_limit,
                                                       const SolverOptions& opts = {});

// Exact P[yes] the interpolated solver samples, through the block encoding.
double nand_yes_probability(const NandTree& tree, const Bits& x, std::int64_t depth_limit,
                            const SolverOptions& opts = {});

// Exact probability that one interpolated run answers wrongly.
double nand_error_probability(const NandTree& tree, const Bits& x, std::int64_t depth_limit,
                              const SolverOptions& opts = {});

Outcome solve_nand_interpolated(const NandTree& tree, const Bits& x, QueryLedger& ledger,
                                std::uint64_t seed, const SolverOptions& opts = {});

struct NandParallelPlan {
  bool delegated = false;  // single subtree: the interpolated solver runs directly
  int subtree_depth = 0;
  int subtrees = 1;
  int repetitions = 1;
  double per_subtree_target = 0.0;
  std::shared_ptr<const NandPlan> subtree_plan;
};

NandParallelPlan plan_nand_parallel(int depth, std::int64_t depth_limit,
                                    const SolverOptions& opts = {});

Outcome solve_nand_parallel(const NandTree& tree, const Bits& x, QueryLedger& ledger,
                            std::uint64_t seed, const SolverOptions& opts = {});

// Lower bound on the parallel solver's success: the product over subtrees of
// the exact majority-vote success built from each subtree's exact error.
double nand_parallel_success_bound(const NandTree& tree, const Bits& x, std::int64_t depth_limit,
                                   const SolverOptions& opts = {});

// Reads every input once.
Outcome classical_nand(const NandTree& tree, const Bits& x, QueryLedger& ledger);

}  // namespace hybridq
