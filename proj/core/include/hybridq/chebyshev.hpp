#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hybridq {

inline constexpr int kDegreeCap = 10000;
inline constexpr int kCertificationPoints = 10000;

// Real polynomial on [-1, 1] in the Chebyshev basis. certified_sup_error is the
// grid-measured deviation from whatever target the constructor approximated.
struct BoundedPolynomial {
  std::vector<double> coeffs{0.0};
  double certified_sup_error = 0.0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Drops trailing zero coefficients so degree() is the last nonzero index.
BoundedPolynomial make_polynomial(std::vector<double> coeffs, double certified_sup_error = 0.0);

// Unchecked Clenshaw recurrence.
double clenshaw(std::span<const double> coeffs, double x) noexcept;

// Throws OutOfDomain for |x| > 1.
double eval_poly(const BoundedPolynomial& p, double x);

// Coefficients of the degree-n interpolant through the n+1 Chebyshev points of
// the first kind.
std::vector<double> chebyshev_interpolate(const std::function<double(double)>& f, int degree);

double erf_inv(double y);

// p with |p(x) - erf(kappa (x - shift))| <= eps on [-1, 1] and |p| <= 1.
BoundedPolynomial erf_poly(double kappa, double shift, double eps, int degree_cap = kDegreeCap);

// Degree erf_poly would return, without the grid certification pass.
int erf_poly_degree(double kappa, double shift, double eps, int degree_cap = kDegreeCap);

struct StepSpec {
  double delta = 0.1;
  double eta = 0.125;
  double mu = 0.0;

  void validate() const;
};

// P(x) = (1 + p(x)) / 2 with p an erf approximant: |P| <= eta below mu - delta,
// P >= 1 - eta above mu + delta, 0 <= P <= 1 everywhere.
BoundedPolynomial step_poly(const StepSpec& spec);

// Difference of two steps at -mu and +mu, each built with leakage eta/2 so the
// pass band clears 1 - eta. Throws InvalidWindow when mu <= delta.
BoundedPolynomial window_poly(const StepSpec& spec);

enum class BoundKind { Step, Window };

struct Certificate {
  bool pass = false;
  double low_margin = 0.0;    // eta - max |P| over the "small" intervals
  double high_margin = 0.0;   // min P - (1 - eta) over the "large" interval
  double range_margin = 0.0;  // 1 - max |P| over [-1, 1]
};

Certificate certify_bounds(const BoundedPolynomial& p, const StepSpec& spec, BoundKind kind,
                           int points_per_interval = kCertificationPoints);

struct Extrema {
  double min = 0.0;
  double max = 0.0;
  double max_abs = 0.0;
};

// Extrema over a uniform grid of `points` on [lo, hi], endpoints included.
Extrema extrema_on(const BoundedPolynomial& p, double lo, double hi,
                   int points = kCertificationPoints);

BoundedPolynomial subtract(const BoundedPolynomial& a, const BoundedPolynomial& b);

// a + b * p, coefficientwise.
BoundedPolynomial affine(const BoundedPolynomial& p, double a, double b);

std::string polynomial_to_json(const BoundedPolynomial& p);
BoundedPolynomial polynomial_from_json(const std::string& text);

}  // namespace hybridq
