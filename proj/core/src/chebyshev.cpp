#include "hybridq/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "hybridq/errors.hpp"

namespace hybridq {

BoundedPolynomial make_polynomial(std::vector<double> coeffs, double certified_sup_error) {
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.empty()) coeffs.push_back(0.0);
  return BoundedPolynomial{std::move(coeffs), certified_sup_error};
}

double clenshaw(std::span<const double> c, double x) noexcept {
  if (c.empty()) return 0.0;
  double b1 = 0.0, b2 = 0.0;
  const double two_x = 2.0 * x;
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    const double b0 = c[k] + two_x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + x * b1 - b2;
}

double eval_poly(const BoundedPolynomial& p, double x) {
  if (!(std::abs(x) <= 1.0)) throw OutOfDomain("polynomial evaluated outside [-1, 1]");
  return clenshaw(p.coeffs, x);
}

std::vector<double> chebyshev_interpolate(const std::function<double(double)>& f, int degree) {
  if (degree < 0) throw InvalidInput("negative interpolation degree");
  const int n = degree + 1;
  // cos(pi * m / (2n)) for m in [0, 4n) covers every k (2j + 1) mod 4n.
  const int period = 4 * n;
  std::vector<double> table(static_cast<std::size_t>(period));
  for (int m = 0; m < period; ++m) table[m] = std::cos(std::numbers::pi * m / (2.0 * n));
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) values[j] = f(table[2 * j + 1]);

  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    long m = k;  // k (2j + 1), advanced by 2k per node
    for (int j = 0; j < n; ++j) {
      s += values[j] * table[static_cast<std::size_t>(m % period)];
      m += 2L * k;
    }
    c[k] = 2.0 * s / n;
  }
  c[0] *= 0.5;
  return c;
}

double erf_inv(double y) {
  if (std::isnan(y) || y < -1.0 || y > 1.0) throw OutOfDomain("erf_inv argument outside [-1, 1]");
  if (y == 1.0) return std::numeric_limits<double>::infinity();
  if (y == -1.0) return -std::numeric_limits<double>::infinity();
  if (y == 0.0) return 0.0;

  // Single-precision rational guess (Giles), then Newton on erf.
  double w = -std::log((1.0 - y) * (1.0 + y));
  double x;
  if (w < 5.0) {
    w -= 2.5;
    double p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
    x = p * y;
  } else {
    w = std::sqrt(w) - 3.0;
    double p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
    x = p * y;
  }
  const double slope = 2.0 / std::sqrt(std::numbers::pi);
  for (int it = 0; it < 60; ++it) {
    const double r = std::erf(x) - y;
    if (std::abs(r) <= 1e-15) break;
    const double d = slope * std::exp(-x * x);
    if (d == 0.0) break;
    const double step = r / d;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

namespace {

// Converged interpolant of (1 - eps/2) erf(kappa (x - shift)).
std::vector<double> erf_series(double kappa, double shift, double eps, int degree_cap) {
  const double scale = 1.0 - 0.5 * eps;
  auto f = [=](double x) { return scale * std::erf(kappa * (x - shift)); };
  const double tol = std::max(4e-16, 1e-6 * eps);
  for (int n = 16;; n *= 2) {
    std::vector<double> c = chebyshev_interpolate(f, n);
    if (std::abs(c[n]) + std::abs(c[n - 1]) < tol) return c;
    if (n > 4 * degree_cap) {
      throw DegreeOverflow("erf approximant does not converge below the degree cap");
    }
  }
}

int truncation_degree(const std::vector<double>& c, double budget) {
  double tail = 0.0;
  int m = static_cast<int>(c.size()) - 1;
  while (m > 0 && tail + std::abs(c[m]) <= budget) {
    tail += std::abs(c[m]);
    --m;
  }
  return m;
}

std::vector<double> uniform_points(double lo, double hi, int points) {
  std::vector<double> xs(static_cast<std::size_t>(std::max(points, 2)));
  const int n = static_cast<int>(xs.size());
  for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
  xs.back() = hi;
  return xs;
}

}  // namespace

int erf_poly_degree(double kappa, double shift, double eps, int degree_cap) {
  if (kappa < 0.0) throw InvalidInput("negative steepness");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
  if (kappa == 0.0) return 0;
  const auto c = erf_series(kappa, shift, eps, degree_cap);
  const int m = truncation_degree(c, 0.45 * eps);
  if (m > degree_cap) throw DegreeOverflow("erf approximant exceeds the degree cap");
  return m;
}

BoundedPolynomial erf_poly(double kappa, double shift, double eps, int degree_cap) {
  if (kappa < 0.0) throw InvalidInput("negative steepness");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
  if (shift < -1.0 || shift > 1.0) throw InvalidInput("erf shift outside [-1, 1]");
  if (kappa == 0.0) return make_polynomial({0.0}, 0.0);

  const auto c = erf_series(kappa, shift, eps, degree_cap);
  int m = truncation_degree(c, 0.45 * eps);
  const auto grid = uniform_points(-1.0, 1.0, kCertificationPoints);
  std::vector<double> target(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) target[i] = std::erf(kappa * (grid[i] - shift));

  for (; m < static_cast<int>(c.size()); ++m) {
    if (m > degree_cap) throw DegreeOverflow("erf approximant exceeds the degree cap");
    std::span<const double> head(c.data(), static_cast<std::size_t>(m + 1));
    double err = 0.0;
    bool bounded = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = clenshaw(head, grid[i]);
      err = std::max(err, std::abs(v - target[i]));
      bounded = bounded && std::abs(v) <= 1.0;
    }
    if (err <= eps && bounded) {
      return make_polynomial(std::vector<double>(head.begin(), head.end()), err);
    }
  }
  throw DegreeOverflow("erf approximant failed grid certification");
}

void StepSpec::validate() const {
  if (!(delta > 0.0)) throw InvalidInput("step transition half-width must be positive");
  if (!(eta > 0.0 && eta < 0.5)) throw InvalidInput("step leakage must lie in (0, 1/2)");
  if (mu < -1.0 || mu > 1.0) throw InvalidInput("step location outside [-1, 1]");
  if (mu - delta < -1.0 - 1e-15 || mu + delta > 1.0 + 1e-15) {
    throw InvalidInput("step transition leaves [-1, 1]");
  }
}

BoundedPolynomial step_poly(const StepSpec& spec) {
  spec.validate();
  // Leakage (eta' + eps) / 2 with eta' = eps = eta.
  const double kappa = erf_inv(1.0 - spec.eta) / spec.delta;
  const BoundedPolynomial p = erf_poly(kappa, spec.mu, spec.eta);
  BoundedPolynomial step = affine(p, 0.5, 0.5);
  step.certified_sup_error = 0.5 * p.certified_sup_error;
  return step;
}

BoundedPolynomial window_poly(const StepSpec& spec) {
  spec.validate();
  if (spec.mu <= spec.delta) throw InvalidWindow("window needs mu > delta");
  const StepSpec half{spec.delta, 0.5 * spec.eta, 0.0};
  StepSpec left = half, right = half;
  left.mu = -spec.mu;
  right.mu = spec.mu;
  const BoundedPolynomial a = step_poly(left);
  const BoundedPolynomial b = step_poly(right);
  BoundedPolynomial w = subtract(a, b);
  w.certified_sup_error = a.certified_sup_error + b.certified_sup_error;
  return w;
}

Extrema extrema_on(const BoundedPolynomial& p, double lo, double hi, int points) {
  Extrema e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
  for (double x : uniform_points(lo, hi, points)) {
    const double v = clenshaw(p.coeffs, x);
    e.min = std::min(e.min, v);
    e.max = std::max(e.max, v);
    e.max_abs = std::max(e.max_abs, std::abs(v));
  }
  return e;
}

Certificate certify_bounds(const BoundedPolynomial& p, const StepSpec& spec, BoundKind kind,
                           int points) {
  Certificate cert;
  const double eta = spec.eta;
  if (kind == BoundKind::Step) {
    const Extrema low = extrema_on(p, -1.0, spec.mu - spec.delta, points);
    const Extrema high = extrema_on(p, spec.mu + spec.delta, 1.0, points);
    cert.low_margin = eta - low.max_abs;
    cert.high_margin = high.min - (1.0 - eta);
  } else {
    const Extrema left = extrema_on(p, -1.0, -spec.mu - spec.delta, points);
    const Extrema right = extrema_on(p, spec.mu + spec.delta, 1.0, points);
    cert.low_margin = eta - std::max(left.max_abs, right.max_abs);
    if (spec.mu - spec.delta >= -spec.mu + spec.delta) {
      const Extrema pass = extrema_on(p, -spec.mu + spec.delta, spec.mu - spec.delta, points);
      cert.high_margin = pass.min - (1.0 - eta);
    } else {
      cert.high_margin = -std::numeric_limits<double>::infinity();
    }
  }
  cert.range_margin = 1.0 - extrema_on(p, -1.0, 1.0, points).max_abs;
  cert.pass = cert.low_margin >= 0.0 && cert.high_margin >= 0.0 && cert.range_margin >= -1e-9;
  return cert;
}

BoundedPolynomial subtract(const BoundedPolynomial& a, const BoundedPolynomial& b) {
  std::vector<double> c(std::max(a.coeffs.size(), b.coeffs.size()), 0.0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] += a.coeffs[i];
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] -= b.coeffs[i];
  return make_polynomial(std::move(c), a.certified_sup_error + b.certified_sup_error);
}

BoundedPolynomial affine(const BoundedPolynomial& p, double a, double b) {
  std::vector<double> c = p.coeffs;
  for (double& v : c) v *= b;
  c[0] += a;
  return make_polynomial(std::move(c), std::abs(b) * p.certified_sup_error);
}

std::string polynomial_to_json(const BoundedPolynomial& p) {
  nlohmann::json j;
  j["basis"] = "chebyshev";
  j["coeffs"] = p.coeffs;
  j["degree"] = p.degree();
  j["certified_sup_error"] = p.certified_sup_error;
  return j.dump();
}

BoundedPolynomial polynomial_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("polynomial JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("basis", "") != "chebyshev" || !j.contains("coeffs")) {
    throw InvalidInput("polynomial JSON must be {basis:\"chebyshev\", coeffs:[...], ...}");
  }
  auto coeffs = j["coeffs"].get<std::vector<double>>();
  BoundedPolynomial p = make_polynomial(std::move(coeffs), j.value("certified_sup_error", 0.0));
  if (j.contains("degree") && j["degree"].get<int>() != p.degree()) {
    throw InvalidInput("polynomial JSON degree does not match its coefficients");
  }
  return p;
}

}  // namespace hybridq
