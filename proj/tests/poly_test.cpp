#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hybridq/chebyshev.hpp"
#include "hybridq/errors.hpp"
#include "hybridq/step_families.hpp"

using namespace hybridq;

namespace {

// Chebyshev series -> monomial coefficients via T_{k+1} = 2x T_k - T_{k-1}.
std::vector<double> to_monomial(const std::vector<double>& c) {
  const std::size_t n = c.size();
  std::vector<std::vector<double>> T(n, std::vector<double>(n, 0.0));
  T[0][0] = 1.0;
  if (n > 1) T[1][1] = 1.0;
  for (std::size_t k = 2; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      T[k][i] = (i > 0 ? 2.0 * T[k - 1][i - 1] : 0.0) - T[k - 2][i];
    }
  }
  std::vector<double> m(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) m[i] += c[k] * T[k][i];
  }
  return m;
}

double horner(const std::vector<double>& m, double x) {
  double y = 0.0;
  for (auto it = m.rbegin(); it != m.rend(); ++it) y = y * x + *it;
  return y;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST(EvalPoly, ConstantAndChebyshevBasis) {
  const auto c = make_polynomial({0.37});
  for (double x : {-1.0, -0.2, 0.0, 0.9, 1.0}) EXPECT_DOUBLE_EQ(eval_poly(c, x), 0.37);
  const auto t3 = make_polynomial({0, 0, 0, 1});
  EXPECT_NEAR(eval_poly(t3, 1.0), 1.0, 1e-15);
  EXPECT_EQ(t3.degree(), 3);
}

TEST(EvalPoly, MatchesMonomialEvaluation) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(21);
  for (double& v : c) v = u(rng) / 4.0;
  const auto p = make_polynomial(c);
  const auto m = to_monomial(c);
  for (int i = 0; i < 64; ++i) {
    const double x = u(rng);
    EXPECT_NEAR(eval_poly(p, x), horner(m, x), 1e-10);
  }
}

TEST(EvalPoly, RejectsPointsOutsideDomain) {
  const auto p = make_polynomial({1.0, 2.0});
  EXPECT_THROW(eval_poly(p, 1.0001), OutOfDomain);
  EXPECT_THROW(eval_poly(p, -2.0), OutOfDomain);
}

TEST(MakePolynomial, TrimsTrailingZeros) {
  EXPECT_EQ(make_polynomial({1.0, 0.5, 0.0, 0.0}).degree(), 1);
  EXPECT_EQ(make_polynomial({0.0, 0.0}).degree(), 0);
}

TEST(ErfInv, MatchesBoost) {
  for (double y : {-0.999, -0.75, -0.1, 0.0, 0.3, 0.875, 0.9999}) {
    EXPECT_NEAR(erf_inv(y), boost::math::erf_inv(y), 1e-12 * std::max(1.0, std::abs(erf_inv(y))));
  }
}

TEST(ErfPoly, ZeroSteepnessIsZeroPolynomial) {
  const auto p = erf_poly(0.0, 0.3, 1e-3);
  EXPECT_EQ(p.degree(), 0);
  EXPECT_EQ(eval_poly(p, 0.5), 0.0);
}

TEST(ErfPoly, AccurateAgainstHighPrecisionErf) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const double kappa = 4.0, eps = 1e-3;
  const auto p = erf_poly(kappa, 0.0, eps);
  EXPECT_LE(p.certified_sup_error, eps);
  double worst = 0.0, peak = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = -1.0 + 2.0 * i / 10000.0;
    const double exact = static_cast<double>(boost::multiprecision::erf(Big(kappa) * Big(x)));
    const double v = eval_poly(p, x);
    worst = std::max(worst, std::abs(v - exact));
    peak = std::max(peak, std::abs(v));
  }
  EXPECT_LE(worst, eps);
  EXPECT_LE(peak, 1.0);
}

TEST(ErfPoly, DegreeGrowsNearLinearlyInSteepness) {
  for (double k0 : {8.0, 16.0, 32.0}) {
    const double ratio = static_cast<double>(erf_poly(2 * k0, 0.0, 1e-3).degree()) /
                         erf_poly(k0, 0.0, 1e-3).degree();
    EXPECT_GE(ratio, 1.0) << k0;
    EXPECT_LE(ratio, 2.5) << k0;
  }
}

TEST(ErfPoly, DegreeCapRaises) {
  EXPECT_THROW(erf_poly(5000.0, 0.0, 1e-6, 100), DegreeOverflow);
}

TEST(StepPoly, MeetsBoundsAtTheTransition) {
  const auto p = step_poly({0.1, 0.125, 0.5});
  EXPECT_LE(std::abs(eval_poly(p, 0.39)), 0.125);
  EXPECT_GE(eval_poly(p, 0.61), 0.875);
  const auto q = step_poly({0.1, 0.125, 0.0});
  EXPECT_LE(std::abs(eval_poly(q, -1.0)), 0.125);
  EXPECT_GE(eval_poly(q, 1.0), 0.875);
}

TEST(StepPoly, HalvingDeltaRoughlyDoublesDegree) {
  const double ratio = static_cast<double>(step_poly({0.05, 0.125, 0.0}).degree()) /
                       step_poly({0.1, 0.125, 0.0}).degree();
  EXPECT_GE(ratio, 1.6);
  EXPECT_LE(ratio, 2.4);
}

TEST(StepPoly, DegreeScalesAsInverseDelta) {
  std::vector<double> inv, deg;
  for (double d : {0.2, 0.1, 0.05, 0.025}) {
    inv.push_back(1.0 / d);
    deg.push_back(step_poly({d, 0.125, 0.0}).degree());
  }
  const double s = slope(inv, deg);
  EXPECT_GE(s, 0.8);
  EXPECT_LE(s, 1.2);
}

TEST(StepPoly, InvalidSpecsRejected) {
  EXPECT_THROW(step_poly({0.0, 0.125, 0.0}), InvalidInput);
  EXPECT_THROW(step_poly({0.1, 0.5, 0.0}), InvalidInput);
  EXPECT_THROW(step_poly({0.2, 0.125, 0.9}), InvalidInput);
}

TEST(WindowPoly, PassBandAndTails) {
  const StepSpec spec{0.05, 0.125, 0.3};
  const auto w = window_poly(spec);
  EXPECT_GE(eval_poly(w, 0.0), 1.0 - spec.eta);
  EXPECT_LE(std::abs(eval_poly(w, 1.0)), spec.eta);
  EXPECT_LE(std::abs(eval_poly(w, -1.0)), spec.eta);
}

TEST(WindowPoly, IsDifferenceOfShiftedSteps) {
  const StepSpec spec{0.05, 0.125, 0.3};
  const auto w = window_poly(spec);
  // Each step carries half the leakage so the pass band clears 1 - eta.
  const auto a = step_poly({spec.delta, spec.eta / 2, -spec.mu});
  const auto b = step_poly({spec.delta, spec.eta / 2, spec.mu});
  const auto diff = subtract(w, subtract(a, b));
  for (double c : diff.coeffs) EXPECT_LT(std::abs(c), 1e-12);
}

TEST(WindowPoly, NarrowWindowRejected) {
  EXPECT_THROW(window_poly({0.1, 0.125, 0.1}), InvalidWindow);
  EXPECT_THROW(window_poly({0.2, 0.125, 0.1}), InvalidWindow);
}

TEST(CertifyBounds, ConstructedPolynomialsPass) {
  const StepSpec s{0.1, 0.125, 0.2};
  EXPECT_TRUE(certify_bounds(step_poly(s), s, BoundKind::Step).pass);
  const StepSpec w{0.05, 0.125, 0.3};
  const auto cert = certify_bounds(window_poly(w), w, BoundKind::Window);
  EXPECT_TRUE(cert.pass);
  EXPECT_GE(cert.low_margin, 0.0);
  EXPECT_GE(cert.high_margin, 0.0);
}

TEST(CertifyBounds, ConstantHalfFailsBothIntervals) {
  const StepSpec s{0.1, 0.125, 0.0};
  const auto cert = certify_bounds(make_polynomial({0.5}), s, BoundKind::Step);
  EXPECT_FALSE(cert.pass);
  EXPECT_LT(cert.low_margin, 0.0);
  EXPECT_LT(cert.high_margin, 0.0);
}

TEST(CertifyBounds, RangeSafetyAcrossSpecs) {
  for (double d : {0.2, 0.1, 0.05}) {
    for (double eta : {0.25, 0.125, 0.01}) {
      for (double mu : {-0.5, 0.0, 0.6}) {
        const auto p = step_poly({d, eta, mu});
        EXPECT_LE(extrema_on(p, -1.0, 1.0).max_abs, 1.0 + 1e-9);
      }
    }
  }
}

TEST(PolynomialJson, RoundTrips) {
  const auto p = step_poly({0.2, 0.125, 0.1});
  const auto q = polynomial_from_json(polynomial_to_json(p));
  EXPECT_EQ(p.coeffs, q.coeffs);
  EXPECT_DOUBLE_EQ(p.certified_sup_error, q.certified_sup_error);
  EXPECT_THROW(polynomial_from_json("{not json"), InvalidInput);
}

TEST(ChebyshevInterpolate, ReproducesLowDegreePolynomials) {
  const auto c = chebyshev_interpolate([](double x) { return 3 * x * x * x - x + 0.5; }, 5);
  const auto p = make_polynomial(c);
  for (double x : {-0.9, -0.1, 0.4, 1.0}) EXPECT_NEAR(eval_poly(p, x), 3 * x * x * x - x + 0.5, 1e-12);
}

TEST(DampedStep, StaysInUnitInterval) {
  for (int deg : {4, 16, 64}) {
    const auto p = damped_step(0.3, deg);
    const auto e = extrema_on(p, -1.0, 1.0);
    EXPECT_GE(e.min, -1e-12);
    EXPECT_LE(e.max, 1.0 + 1e-12);
  }
  const auto w = damped_window(0.2, 32);
  EXPECT_GT(eval_poly(w, 0.0), eval_poly(w, 0.9));
}

TEST(BudgetedErfStep, RespectsDegreeBudgetAndSeparates) {
  for (int budget : {8, 16, 32}) {
    const auto p = budgeted_erf_step(0.3, 0.05, budget);
    ASSERT_TRUE(p.has_value());
    EXPECT_LE(p->degree(), budget);
    const auto b = step_bounds(*p, 0.3, 0.05);
    EXPECT_GT(b.high, b.low);
  }
  EXPECT_FALSE(budgeted_erf_step(0.3, 0.05, 0).has_value());
}
