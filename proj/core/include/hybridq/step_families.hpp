#pragma once

#include <optional>

#include "hybridq/chebyshev.hpp"

namespace hybridq {

// Degree-limited steps and windows for the regime where the full-accuracy
// polynomial does not fit under the depth budget. All results satisfy
// |P| <= 1 on the certification grid.

// Jackson-damped Chebyshev series of the indicator 1{x > center}. Values stay in
// [0, 1] because the damping kernel is positive.
BoundedPolynomial damped_step(double center, int degree);

// damped_step(-c) - damped_step(c): a window of half-width c with values in [0, 1].
BoundedPolynomial damped_window(double center, int degree);

// (1 + p) / 2 with p an erf approximant whose error is at most half of the erf's
// own jump erf(kappa delta) at distance delta, at the largest kappa whose degree
// fits `max_degree`. Empty when even tiny kappa does not fit.
std::optional<BoundedPolynomial> budgeted_erf_step(double mu, double delta, int max_degree);

// Degree-n interpolant of (erf(kappa (x + mu)) - erf(kappa (x - mu))) / 2,
// scaled down when its grid maximum exceeds 1.
BoundedPolynomial interpolated_window(double kappa, double mu, int degree,
                                      int grid_points = kCertificationPoints);

// Certified separation of a step on the nonnegative axis: `low` is max |P| on
// [0, mu - delta], `high` is min P on [mu + delta, 1].
struct StepBounds {
  double low = 0.0;
  double high = 0.0;
};
StepBounds step_bounds(const BoundedPolynomial& p, double mu, double delta,
                       int points = kCertificationPoints);

}  // namespace hybridq
