#include "hybridq/step_families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hybridq/errors.hpp"

namespace hybridq {

namespace {

// Jackson kernel factors g_0..g_n for a degree-n expansion.
std::vector<double> jackson_factors(int n) {
  const double q = n + 2.0;
  const double a = std::numbers::pi / q;
  std::vector<double> g(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) {
    g[k] = ((q - k) * std::cos(k * a) + std::sin(k * a) / std::tan(a)) / q;
  }
  return g;
}

}  // namespace

BoundedPolynomial damped_step(double center, int degree) {
  if (degree < 0) throw InvalidInput("negative degree");
  if (center <= -1.0 || center >= 1.0) throw InvalidInput("step center must lie in (-1, 1)");
  const double theta = std::acos(center);
  const auto g = jackson_factors(degree);
  std::vector<double> c(static_cast<std::size_t>(degree + 1));
  c[0] = theta / std::numbers::pi;
  for (int k = 1; k <= degree; ++k) {
    c[k] = g[k] * 2.0 * std::sin(k * theta) / (k * std::numbers::pi);
  }
  return make_polynomial(std::move(c));
}

BoundedPolynomial damped_window(double center, int degree) {
  if (!(center > 0.0)) throw InvalidWindow("window half-width must be positive");
  return subtract(damped_step(-center, degree), damped_step(center, degree));
}

std::optional<BoundedPolynomial> budgeted_erf_step(double mu, double delta, int max_degree) {
  if (max_degree < 1) return std::nullopt;
  auto eps_for = [delta](double kappa) { return 0.5 * std::erf(kappa * delta); };
  auto fits = [&](double kappa) {
    const double eps = eps_for(kappa);
    if (!(eps > 0.0)) return true;
    try {
      return erf_poly_degree(kappa, mu, std::min(eps, 0.5), 4 * max_degree + 64) <= max_degree;
    } catch (const DegreeOverflow&) {
      return false;
    }
  };

  // Past kappa delta ~ 3 the erf jump saturates; there is no point going further.
  double hi = 3.0 / delta;
  double lo = 0.0;
  if (fits(hi)) {
    lo = hi;
  } else {
    for (int it = 0; it < 40 && hi - lo > 1e-3 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fits(mid) ? lo : hi) = mid;
    }
  }
  if (lo <= 0.0 || !(eps_for(lo) > 0.0)) return std::nullopt;
  const BoundedPolynomial p = erf_poly(lo, mu, std::min(eps_for(lo), 0.5));
  if (p.degree() > max_degree) return std::nullopt;
  BoundedPolynomial step = affine(p, 0.5, 0.5);
  step.certified_sup_error = 0.5 * p.certified_sup_error;
  return step;
}

BoundedPolynomial interpolated_window(double kappa, double mu, int degree, int grid_points) {
  if (degree < 0) throw InvalidInput("negative degree");
  auto f = [=](double x) { return 0.5 * (std::erf(kappa * (x + mu)) - std::erf(kappa * (x - mu))); };
  BoundedPolynomial p = make_polynomial(chebyshev_interpolate(f, degree));
  const double peak = extrema_on(p, -1.0, 1.0, grid_points).max_abs;
  if (peak > 1.0) {
    for (double& c : p.coeffs) c /= peak * (1.0 + 1e-12);
  }
  return p;
}

StepBounds step_bounds(const BoundedPolynomial& p, double mu, double delta, int points) {
  StepBounds b;
  b.low = mu - delta >= 0.0 ? extrema_on(p, 0.0, mu - delta, points).max_abs
                            : std::abs(clenshaw(p.coeffs, 0.0));
  b.high = extrema_on(p, std::min(mu + delta, 1.0), 1.0, points).min;
  return b;
}

}  // namespace hybridq
