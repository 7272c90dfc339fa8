#include "hybridq/amplitude_estimation.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hybridq/errors.hpp"

namespace hybridq {

namespace {

double fejer(double delta, int M) {
  const double s = std::sin(std::numbers::pi * delta);
  if (std::abs(s) < 1e-13) return 1.0;
  const double t = std::sin(M * std::numbers::pi * delta);
  return (t * t) / (static_cast<double>(M) * M * s * s);
}

}  // namespace

std::vector<double> ae_outcome_distribution(double a, int M) {
  if (M < 1) throw InvalidInput("amplitude estimation needs M >= 1");
  if (!(a >= 0.0 && a <= 1.0)) throw OutOfDomain("amplitude must lie in [0, 1]");
  const double omega = std::asin(std::sqrt(a)) / std::numbers::pi;
  std::vector<double> p(static_cast<std::size_t>(M));
  double total = 0.0;
  for (int y = 0; y < M; ++y) {
    const double x = static_cast<double>(y) / M;
    p[y] = 0.5 * fejer(x - omega, M) + 0.5 * fejer(x + omega, M);
    if (p[y] < 1e-14) p[y] = 0.0;  // roundoff residue where the outcome is impossible
    total += p[y];
  }
  for (double& v : p) v /= total;
  return p;
}

double ae_estimate_value(int y, int M) {
  const double s = std::sin(std::numbers::pi * y / M);
  return s * s;
}

double brassard_error_bound(double a, int M) {
  const double pi = std::numbers::pi;
  return 2.0 * pi * std::sqrt(a * (1.0 - a)) / M + pi * pi / (static_cast<double>(M) * M);
}

double amplitude_estimate(double a, int M, Rng& rng) {
  const auto p = ae_outcome_distribution(a, M);
  std::discrete_distribution<int> dist(p.begin(), p.end());
  return ae_estimate_value(dist(rng), M);
}

double amplitude_estimate(double a, int M, std::uint64_t seed) {
  Rng rng(seed);
  return amplitude_estimate(a, M, rng);
}

}  // namespace hybridq
