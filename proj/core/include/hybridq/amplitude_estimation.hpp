#pragma once

#include <cstdint>
#include <vector>

#include "hybridq/random.hpp"

namespace hybridq {

// Outcome distribution of canonical amplitude estimation with M Grover steps:
// P(y) = ½F(y/M − ω) + ½F(y/M + ω), F(Δ) = sin²(MπΔ) / (M² sin²(πΔ)),
// ω = arcsin(√a)/π. Exact for every a when M is even.
std::vector<double> ae_outcome_distribution(double a, int M);

// sin²(π y / M)
double ae_estimate_value(int y, int M);

// |est − a| ≤ 2π√(a(1−a))/M + π²/M² holds with probability ≥ 8/π².
double brassard_error_bound(double a, int M);

double amplitude_estimate(double a, int M, Rng& rng);
double amplitude_estimate(double a, int M, std::uint64_t seed);

}  // namespace hybridq
