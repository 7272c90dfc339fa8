#pragma once

#include <cstdint>

namespace hybridq {

// Knobs shared by every depth-limited solver.
struct SolverOptions {
  std::int64_t cost_multiplier = 1;   // oracle calls charged per polynomial degree unit
  double failure = 0.1;               // per-solve failure budget
  bool classical_when_cheaper = false;
  std::int64_t shot_cap = 100'000'000;
  double subtree_size_factor = 1.0;   // c_p: NAND parallel subtrees hold <= c_p D² leaves
};

struct Outcome {
  int answer = 0;
  bool fallback = false;  // answered by classical exhaustive reading
};

}  // namespace hybridq
