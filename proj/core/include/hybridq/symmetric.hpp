#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hybridq/block_encoding.hpp"
#include "hybridq/ledger.hpp"
#include "hybridq/solver.hpp"

namespace hybridq {

// Total symmetric Boolean function given by its value at each Hamming weight.
struct SymmetricFunction {
  std::vector<std::uint8_t> table;

  int size() const { return static_cast<int>(table.size()) - 1; }
  int operator()(int weight) const { return table.at(static_cast<std::size_t>(weight)); }
  void validate() const;  // NotApplicable when constant

  static SymmetricFunction parity(int n);
  static SymmetricFunction majority(int n);  // 1 iff weight > n/2
  static SymmetricFunction threshold(int n, int k);
  static SymmetricFunction from_json(const std::string& text);
};

// Largest g such that f is constant on the integer weights of [(N-g)/2, (N+g)/2].
int gamma_of(const SymmetricFunction& f);

struct Plateau {
  int lo = 0;
  int hi = 0;
};
Plateau plateau_of(const SymmetricFunction& f);

struct WeightWindow {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double z) const { return lo <= z && z <= hi; }
};

inline constexpr double kCutLeakage = 0.125;

// Degree of the erf step used to halve a window of this width.
int cut_degree(double width);

// One halving round on a scalar encoding of z ∈ window: samples the transformed
// flag ceil(ln(2/E) / (2σ²)) times with σ = η/8 and inverts the erf.
WeightWindow cut_in_half(const BlockEncoding& be, const WeightWindow& window, double failure,
                         QueryLedger& ledger, Rng& rng, const SolverOptions& opts = {});

struct WeightEstimate {
  int weight = 0;
  bool fallback = false;
  int halving_rounds = 0;
  bool refined = false;
};

// Halves the window [0, √(w_max/N)] until its width reaches Δ^(1-α), then finishes
// with one statistical refinement down to Δ, the half-gap between the top two
// admissible values of √(w/N). With complement set, estimates N - |x|.
WeightEstimate estimate_hamming_weight(const OracleInput& input, double alpha, QueryLedger& ledger,
                                       std::uint64_t seed, int max_weight = -1,
                                       double failure = 1.0 / 3.0, bool complement = false,
                                       const SolverOptions& opts = {});

enum class Branch { In, Below, Above };

// Branch taken and value returned when every subroutine answers exactly.
struct BranchResult {
  Branch branch = Branch::In;
  int output = 0;
};
BranchResult symmetric_branch(const SymmetricFunction& f, int weight);

Outcome solve_symmetric(const SymmetricFunction& f, const OracleInput& input, QueryLedger& ledger,
                        std::uint64_t seed, double alpha = 1.0, const SolverOptions& opts = {});

}  // namespace hybridq
