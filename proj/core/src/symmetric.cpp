#include "hybridq/symmetric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include <json.hpp>

#include "hybridq/chebyshev.hpp"
#include "hybridq/errors.hpp"
#include "hybridq/threshold.hpp"
#include "memo.hpp"

namespace hybridq {

namespace {

constexpr double kSigma = kCutLeakage / 8.0;

double kappa_for(double width) { return 2.0 * erf_inv(1.0 - 2.0 * kCutLeakage) / width; }

// (1 + p) / 2 with p ≈ erf(kappa (x - mu)); erf_error bounds |p - erf|.
struct ErfStep {
  BoundedPolynomial step;
  double erf_error = 0.0;
};

std::shared_ptr<const ErfStep> erf_step(double kappa, double mu, double eps) {
  static detail::Memo<std::tuple<double, double, double>, ErfStep> memo;
  return memo.get({kappa, mu, eps}, [&] {
    const BoundedPolynomial p = erf_poly(kappa, mu, eps);
    return ErfStep{affine(p, 0.5, 0.5), p.certified_sup_error};
  });
}

// z-interval consistent with a flag probability in [q_lo, q_hi].
WeightWindow invert(double q_lo, double q_hi, double err, double kappa, double mu) {
  q_lo = std::clamp(q_lo, 0.0, 1.0);
  q_hi = std::clamp(q_hi, 0.0, 1.0);
  const double e_lo = std::clamp(2.0 * std::sqrt(q_lo) - 1.0 - err, -1.0, 1.0);
  const double e_hi = std::clamp(2.0 * std::sqrt(q_hi) - 1.0 + err, -1.0, 1.0);
  return {mu + erf_inv(e_lo) / kappa, mu + erf_inv(e_hi) / kappa};
}

WeightWindow intersect(const WeightWindow& a, const WeightWindow& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

// A window of exactly `target` inside `outer`: it covers `found` when that is a
// valid interval no wider than target, else it is centered on the point estimate.
// Fixed widths keep the polynomial degrees of later rounds predictable.
WeightWindow settle(const WeightWindow& found, const WeightWindow& outer, double estimate,
                    double target) {
  const bool usable = found.lo <= found.hi && found.width() <= target;
  const double half = 0.5 * target;
  const double c = std::clamp(usable ? 0.5 * (found.lo + found.hi) : estimate, outer.lo + half,
                              outer.hi - half);
  return {c - half, c + half};
}

std::int64_t shots_for(double failure, double sigma) {
  return static_cast<std::int64_t>(std::ceil(std::log(2.0 / failure) / (2.0 * sigma * sigma)));
}

// One sampling round: returns the inverted interval (unsettled) and the point estimate.
std::pair<WeightWindow, double> sample_round(const BlockEncoding& be, const WeightWindow& window,
                                             const ErfStep& step, double kappa, double sigma,
                                             std::int64_t shots, QueryLedger& ledger, Rng& rng,
                                             const SolverOptions& opts) {
  const double mu = 0.5 * (window.lo + window.hi);
  const BlockEncoding t = apply_qsvt(be, step.step, opts.cost_multiplier);
  const std::int64_t ones = sample_flag(t, t.basis_state(0), shots, ledger, rng);
  const double qhat = static_cast<double>(ones) / static_cast<double>(shots);
  const WeightWindow iv = intersect(invert(qhat - sigma, qhat + sigma, step.erf_error, kappa, mu), window);
  const double e = std::clamp(2.0 * std::sqrt(qhat) - 1.0, -1.0, 1.0);
  double z = mu + erf_inv(e) / kappa;
  if (!std::isfinite(z)) z = e > 0.0 ? window.hi : window.lo;
  return {iv, std::clamp(z, window.lo, window.hi)};
}

// Worst width, over z in a window of width W centered at 0, of the interval a
// refinement round returns when its frequency lands within sigma of the truth.
double worst_refined_width(double kappa, double sigma, double width) {
  const WeightWindow outer{-0.5 * width, 0.5 * width};
  double worst = 0.0;
  constexpr int kGrid = 257;
  for (int i = 0; i < kGrid; ++i) {
    const double z = outer.lo + width * i / (kGrid - 1);
    const double e = std::erf(kappa * z);
    const double p_lo = 0.5 * (1.0 + std::clamp(e - sigma, -1.0, 1.0));
    const double p_hi = 0.5 * (1.0 + std::clamp(e + sigma, -1.0, 1.0));
    const WeightWindow iv =
        intersect(invert(p_lo * p_lo - 2.0 * sigma, p_hi * p_hi + 2.0 * sigma, sigma, kappa, 0.0), outer);
    worst = std::max(worst, iv.width());
  }
  return worst;
}

struct RefinePlan {
  bool feasible = false;
  double kappa = 0.0;
  double sigma = 0.0;
  std::int64_t shots = 0;
};

RefinePlan plan_refinement(double width, double target, double failure, std::int64_t max_degree,
                           std::int64_t shot_cap) {
  using Key = std::tuple<double, double, double, std::int64_t, std::int64_t>;
  static detail::Memo<Key, RefinePlan> memo;
  return *memo.get({width, target, failure, max_degree, shot_cap}, [&] {
    RefinePlan plan;
    double kappa = kappa_for(width);
    for (int attempt = 0; attempt < 40; ++attempt, kappa *= 0.5) {
      if (worst_refined_width(kappa, 1e-9, width) > target) continue;
      double lo = 1e-9, hi = kSigma;
      if (worst_refined_width(kappa, hi, width) <= target) {
        lo = hi;
      } else {
        for (int it = 0; it < 50 && hi / lo > 1.0001; ++it) {
          const double mid = std::sqrt(lo * hi);
          (worst_refined_width(kappa, mid, width) <= target ? lo : hi) = mid;
        }
      }
      int degree = 0;
      try {
        degree = erf_poly_degree(kappa, 0.0, lo);
      } catch (const DegreeOverflow&) {
        continue;
      }
      if (degree > max_degree) continue;
      const std::int64_t shots = shots_for(failure, lo);
      if (shots > shot_cap) break;
      plan = {true, kappa, lo, shots};
      break;
    }
    return plan;
  });
}

}  // namespace

void SymmetricFunction::validate() const {
  if (table.size() < 2) throw InvalidInput("symmetric function table needs N + 1 >= 2 entries");
  for (auto v : table) {
    if (v > 1) throw InvalidInput("symmetric function table entries must be 0 or 1");
  }
  if (std::all_of(table.begin(), table.end(), [&](auto v) { return v == table.front(); })) {
    throw NotApplicable("symmetric function is constant");
  }
}

SymmetricFunction SymmetricFunction::parity(int n) {
  SymmetricFunction f;
  for (int w = 0; w <= n; ++w) f.table.push_back(static_cast<std::uint8_t>(w % 2));
  return f;
}

SymmetricFunction SymmetricFunction::majority(int n) {
  SymmetricFunction f;
  for (int w = 0; w <= n; ++w) f.table.push_back(2 * w > n ? 1 : 0);
  return f;
}

SymmetricFunction SymmetricFunction::threshold(int n, int k) {
  SymmetricFunction f;
  for (int w = 0; w <= n; ++w) f.table.push_back(w > k ? 1 : 0);
  return f;
}

SymmetricFunction SymmetricFunction::from_json(const std::string& text) {
  SymmetricFunction f;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_array()) throw InvalidInput("symmetric function JSON must be an array of 0/1");
    for (const auto& v : j) {
      const int b = v.get<int>();
      if (b != 0 && b != 1) throw InvalidInput("symmetric function entries must be 0 or 1");
      f.table.push_back(static_cast<std::uint8_t>(b));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("symmetric function JSON: ") + e.what());
  }
  return f;
}

int gamma_of(const SymmetricFunction& f) {
  f.validate();
  const int n = f.size();
  for (int g = n; g >= 0; g -= 2) {
    const int lo = (n - g + 1) / 2;
    const int hi = (n + g) / 2;
    bool constant = true;
    for (int w = lo; w <= hi && constant; ++w) constant = f(w) == f(lo);
    if (constant) return g;
  }
  return 0;
}

Plateau plateau_of(const SymmetricFunction& f) {
  const int n = f.size();
  const int g = gamma_of(f);
  return {(n - g + 1) / 2, (n + g) / 2};
}

int cut_degree(double width) {
  static detail::Memo<double, int> memo;
  return *memo.get(width, [&] { return erf_poly_degree(kappa_for(width), 0.0, kSigma); });
}

WeightWindow cut_in_half(const BlockEncoding& be, const WeightWindow& window, double failure,
                         QueryLedger& ledger, Rng& rng, const SolverOptions& opts) {
  if (!(failure > 0.0 && failure < 1.0)) throw InvalidInput("failure budget must lie in (0, 1)");
  if (window.lo > window.hi) throw InvalidWindow("window has lo > hi");
  if (window.lo < -1.0 || window.hi > 1.0) throw InvalidWindow("window leaves [-1, 1]");
  const double width = window.width();
  if (width <= 0.0) return window;

  const double kappa = kappa_for(width);
  const double mu = 0.5 * (window.lo + window.hi);
  const auto step = erf_step(kappa, mu, kSigma);
  const auto [iv, z] = sample_round(be, window, *step, kappa, kSigma, shots_for(failure, kSigma),
                                    ledger, rng, opts);
  return settle(iv, window, z, 0.5 * width);
}

WeightEstimate estimate_hamming_weight(const OracleInput& input, double alpha, QueryLedger& ledger,
                                       std::uint64_t seed, int max_weight, double failure,
                                       bool complement, const SolverOptions& opts) {
  const int n = static_cast<int>(input.size());
  const int w_max = max_weight < 0 ? n : max_weight;
  if (w_max > n) throw InvalidInput("max weight exceeds N");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in [0, 1]");
  if (!(failure > 0.0 && failure < 1.0)) throw InvalidInput("failure budget must lie in (0, 1)");
  WeightEstimate out;
  if (w_max == 0) return out;

  const std::int64_t max_degree = ledger.depth_limit() / opts.cost_multiplier;
  const double top = std::sqrt(static_cast<double>(w_max) / n);
  const double delta = 0.5 * (top - std::sqrt(static_cast<double>(w_max - 1) / n));
  const double coarse = std::pow(delta, 1.0 - alpha);

  int halvings = 0;
  double width = top;
  while (width > coarse && width > delta && cut_degree(width) <= max_degree) {
    width *= 0.5;
    ++halvings;
  }
  const bool refine = width > delta;
  const double round_failure = failure / std::max(1, halvings + (refine ? 1 : 0));
  RefinePlan plan;
  if (refine) {
    plan = plan_refinement(width, delta, round_failure, max_degree, opts.shot_cap);
  }
  auto classical = [&] {
    ledger.record(1, n);
    out = WeightEstimate{};
    out.fallback = true;
    out.weight = complement ? n - input.weight() : input.weight();
    return out;
  };
  if (refine && !plan.feasible) return classical();

  const BlockEncoding be =
      complement ? complement_block_encoding(input) : threshold_block_encoding(input);
  Rng rng(seed);
  WeightWindow window{0.0, top};
  for (int i = 0; i < halvings; ++i) {
    window = cut_in_half(be, window, round_failure, ledger, rng, opts);
  }
  out.halving_rounds = halvings;
  if (refine) {
    const double mu = 0.5 * (window.lo + window.hi);
    const auto step = erf_step(plan.kappa, mu, plan.sigma);
    if (step->step.degree() > max_degree) return classical();
    const auto [iv, z] = sample_round(be, window, *step, plan.kappa, plan.sigma, plan.shots, ledger,
                                      rng, opts);
    window = settle(iv, window, z, delta);
    out.refined = true;
  }

  // At most one admissible √(w/N) fits in a window no wider than delta.
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  const double center = 0.5 * (window.lo + window.hi);
  for (int w = 0; w <= w_max; ++w) {
    const double z = std::sqrt(static_cast<double>(w) / n);
    const double dist = window.contains(z) ? -1.0 : std::abs(z - center);
    if (dist < best_dist) {
      best_dist = dist;
      best = w;
    }
  }
  out.weight = best;
  return out;
}

BranchResult symmetric_branch(const SymmetricFunction& f, int weight) {
  const Plateau pl = plateau_of(f);
  if (weight < pl.lo) return {Branch::Below, f(weight)};
  if (weight > pl.hi) return {Branch::Above, f(weight)};
  return {Branch::In, f(pl.lo)};
}

Outcome solve_symmetric(const SymmetricFunction& f, const OracleInput& input, QueryLedger& ledger,
                        std::uint64_t seed, double alpha, const SolverOptions& opts) {
  f.validate();
  const int n = f.size();
  if (static_cast<int>(input.size()) != n) throw InvalidInput("input size does not match f");
  const Plateau pl = plateau_of(f);
  SolverOptions sub = opts;
  sub.failure = opts.failure / 3.0;

  Outcome out;
  bool below = false, above = false;
  if (pl.lo >= 1) {
    const Outcome o = solve_threshold_interpolated({input, pl.lo - 1}, ledger, derive_seed(seed, 1), sub);
    out.fallback = out.fallback || o.fallback;
    below = o.answer == 0;
  }
  if (!below && pl.hi <= n - 1) {
    const Outcome o = solve_threshold_interpolated({input, pl.hi}, ledger, derive_seed(seed, 2), sub);
    out.fallback = out.fallback || o.fallback;
    above = o.answer == 1;
  }
  if (below) {
    const WeightEstimate e = estimate_hamming_weight(input, alpha, ledger, derive_seed(seed, 3),
                                                     pl.lo - 1, sub.failure, false, opts);
    out.fallback = out.fallback || e.fallback;
    out.answer = f(e.weight);
  } else if (above) {
    const WeightEstimate e = estimate_hamming_weight(input, alpha, ledger, derive_seed(seed, 3),
                                                     n - pl.hi - 1, sub.failure, true, opts);
    out.fallback = out.fallback || e.fallback;
    out.answer = f(n - e.weight);
  } else {
    out.answer = f(std::min(pl.lo, n));
  }
  return out;
}

}  // namespace hybridq
