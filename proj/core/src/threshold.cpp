#include "hybridq/threshold.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/hypergeometric.hpp>

#include "hybridq/amplitude_estimation.hpp"
#include "hybridq/errors.hpp"
#include "hybridq/step_families.hpp"
#include "memo.hpp"

namespace hybridq {

namespace {

using PlanKey = std::tuple<int, int, std::int64_t, std::int64_t, double, bool, std::int64_t>;

PlanKey plan_key(int n, int k, std::int64_t depth, const SolverOptions& o) {
  return {n, k, depth, o.cost_multiplier, o.failure, o.classical_when_cheaper, o.shot_cap};
}

void check_plan_args(int n_items, std::int64_t depth, const SolverOptions& opts) {
  if (n_items < 1 || !std::has_single_bit(static_cast<unsigned>(n_items))) {
    throw InvalidSize("input size must be a power of two");
  }
  if (depth < 1) throw InvalidBudget("depth limit must be >= 1");
  if (opts.cost_multiplier < 1) throw InvalidInput("cost multiplier must be >= 1");
  if (!(opts.failure > 0.0 && opts.failure < 1.0 / 3.0)) {
    throw InvalidInput("failure budget must lie in (0, 1/3)");
  }
}

// Kept in floating point: tiny gaps overflow any integer type.
double hoeffding_shots(double gap, double failure) {
  return std::ceil(2.0 * std::log(1.0 / failure) / (gap * gap));
}

struct Candidate {
  std::string family;
  BoundedPolynomial poly;
};

std::optional<BoundedPolynomial> best_damped_step(double mu, double delta, int degree) {
  if (degree < 1) return std::nullopt;
  double best_gap = 0.0, best_center = 0.0;
  for (int i = -30; i <= 30; ++i) {
    const double c = std::clamp(mu + 0.1 * i / degree, -0.99, 0.99);
    const StepBounds b = step_bounds(damped_step(c, degree), mu, delta, 500);
    const double gap = b.high > b.low ? b.high * b.high - b.low * b.low : 0.0;
    if (gap > best_gap) {
      best_gap = gap;
      best_center = c;
    }
  }
  if (best_gap <= 0.0) return std::nullopt;
  return damped_step(best_center, degree);
}

InterpolationPlan build_interpolation_plan(int n_items, ThresholdRoute route, std::int64_t depth,
                                           const SolverOptions& opts) {
  InterpolationPlan plan;
  plan.route = route;
  if (route.trivial) {
    plan.family = "trivial";
    return plan;
  }
  auto classical = [&] {
    plan.classical = true;
    plan.family = "classical";
    plan.poly = BoundedPolynomial{};
    plan.expected_total = n_items;
    return plan;
  };

  const std::int64_t max_degree = depth / opts.cost_multiplier;
  const int k = route.k_eff;
  const double lo = std::sqrt(static_cast<double>(k) / n_items);
  const double hi = std::sqrt(static_cast<double>(k + 1) / n_items);
  plan.mu = 0.5 * (lo + hi);
  plan.delta = 0.5 * (hi - lo);
  if (max_degree < 1) return classical();
  const int budget = static_cast<int>(std::min<std::int64_t>(max_degree, kDegreeCap));

  std::vector<Candidate> candidates;
  if (plan.mu + plan.delta <= 1.0) {
    const StepSpec full{plan.delta, 0.125, plan.mu};
    try {
      const double kappa = erf_inv(1.0 - full.eta) / full.delta;
      if (erf_poly_degree(kappa, full.mu, full.eta) <= budget) {
        candidates.push_back({"full-step", step_poly(full)});
      }
    } catch (const DegreeOverflow&) {
    }
  }
  if (auto p = budgeted_erf_step(plan.mu, plan.delta, budget)) {
    candidates.push_back({"erf-budget", *p});
  }
  if (auto p = best_damped_step(plan.mu, plan.delta, budget)) {
    candidates.push_back({"damped", *p});
  }

  double best_cost = std::numeric_limits<double>::infinity();
  for (const Candidate& c : candidates) {
    if (c.poly.degree() < 1) continue;
    const StepBounds b = step_bounds(c.poly, plan.mu, plan.delta);
    if (!(b.high > b.low) || b.high <= 0.0) continue;
    const double gap = b.high * b.high - b.low * b.low;
    const double shots = hoeffding_shots(gap, opts.failure);
    const std::int64_t per_circuit = opts.cost_multiplier * c.poly.degree();
    const double cost = shots * per_circuit;
    if (shots > static_cast<double>(opts.shot_cap) || cost >= best_cost) continue;
    best_cost = cost;
    plan.family = c.family;
    plan.poly = c.poly;
    plan.low = b.low;
    plan.high = b.high;
    plan.decision = 0.5 * (b.low * b.low + b.high * b.high);
    plan.shots = static_cast<std::int64_t>(shots);
    plan.circuit_cost = per_circuit;
    plan.expected_total = plan.shots * per_circuit;
  }
  if (!std::isfinite(best_cost)) return classical();
  if (opts.classical_when_cheaper && plan.expected_total >= n_items) return classical();
  return plan;
}

// Probability that the rounded median-free estimate of a bin with `ones` of
// `size` items is acceptable: exact when ones <= load, >= load + 1 otherwise.
double bin_success(int ones, int size, int load, int M) {
  const auto dist = ae_outcome_distribution(static_cast<double>(ones) / size, M);
  double ok = 0.0;
  for (int y = 0; y < M; ++y) {
    const double est = size * ae_estimate_value(y, M);
    const bool good = ones <= load ? std::abs(est - ones) < 0.5 : est >= load + 0.5;
    if (good) ok += dist[y];
  }
  return ok;
}

// Smallest odd r whose median of r Bernoulli(rho) successes fails w.p. <= target.
int median_repetitions(double rho, double target) {
  for (int r = 1; r <= 4001; r += 2) {
    boost::math::binomial_distribution<double> b(r, rho);
    if (boost::math::cdf(b, (r - 1) / 2) <= target) return r;
  }
  return -1;
}

ParallelPlan build_parallel_plan(int n_items, ThresholdRoute route, std::int64_t depth,
                                 const SolverOptions& opts) {
  ParallelPlan plan;
  plan.route = route;
  if (route.trivial) return plan;
  auto classical = [&] {
    plan.classical = true;
    plan.expected_total = n_items;
    return plan;
  };
  const std::int64_t max_steps = depth / opts.cost_multiplier;
  if (max_steps < 2) return classical();

  const int k = route.k_eff;
  const double load_budget = 0.5 * opts.failure;
  const double bin_budget = 0.5 * opts.failure;
  double best_cost = std::numeric_limits<double>::infinity();

  for (int p = 1; p <= n_items; p *= 2) {
    const int m = n_items / p;
    const int ones = std::min(k + 1, n_items);
    int load = std::min(m, ones);
    double load_fail = 0.0;
    {
      boost::math::hypergeometric_distribution<double> hyp(ones, m, n_items);
      for (int L = std::max(0, m + ones - n_items); L < std::min(m, ones); ++L) {
        const double tail = p * (1.0 - boost::math::cdf(hyp, L));
        if (tail <= load_budget) {
          load = L;
          load_fail = std::max(0.0, tail);
          break;
        }
      }
    }
    for (std::int64_t M = 2; M <= max_steps; M *= 2) {
      double rho = 1.0;
      for (int c = 0; c <= m && rho > 0.5; ++c) {
        rho = std::min(rho, bin_success(c, m, load, static_cast<int>(M)));
      }
      if (rho <= 0.5) continue;
      const int r = median_repetitions(rho, bin_budget / p);
      if (r < 0) continue;
      const double cost = static_cast<double>(p) * r * M * opts.cost_multiplier;
      if (cost >= best_cost) continue;
      best_cost = cost;
      plan.bins = p;
      plan.bin_size = m;
      plan.grover_steps = static_cast<int>(M);
      plan.repetitions = r;
      plan.design_load = load;
      plan.load_failure = load_fail;
      boost::math::binomial_distribution<double> b(r, rho);
      plan.bin_failure = boost::math::cdf(b, (r - 1) / 2);
      plan.many_ones = k >= p * std::max(1.0, std::log2(static_cast<double>(p)));
      plan.expected_total = static_cast<std::int64_t>(cost);
    }
  }
  if (!std::isfinite(best_cost)) return classical();
  if (opts.classical_when_cheaper && plan.expected_total >= n_items) return classical();
  return plan;
}

detail::Memo<PlanKey, InterpolationPlan>& interpolation_memo() {
  static detail::Memo<PlanKey, InterpolationPlan> memo;
  return memo;
}

detail::Memo<PlanKey, ParallelPlan>& parallel_memo() {
  static detail::Memo<PlanKey, ParallelPlan> memo;
  return memo;
}

void check_instance(const ThresholdInstance& inst) {
  if (inst.k < 0 || inst.k > static_cast<int>(inst.input.size())) {
    throw InvalidInput("threshold k must lie in [0, N]");
  }
}

}  // namespace

int threshold_value(const OracleInput& input, int k) { return input.weight() > k ? 1 : 0; }

ThresholdRoute threshold_route(int n_items, int k) {
  ThresholdRoute r;
  if (k < 0) throw InvalidInput("threshold k must be nonnegative");
  if (k >= n_items) {
    r.trivial = true;
    return r;
  }
  if (2 * k > n_items) {
    r.complement = true;
    r.k_eff = n_items - k - 1;
  } else {
    r.k_eff = k;
  }
  return r;
}

std::shared_ptr<const InterpolationPlan> plan_threshold_interpolation(int n_items, int k,
                                                                      std::int64_t depth,
                                                                      const SolverOptions& opts) {
  check_plan_args(n_items, depth, opts);
  const ThresholdRoute route = threshold_route(n_items, k);
  return interpolation_memo().get(plan_key(n_items, k, depth, opts), [&] {
    return build_interpolation_plan(n_items, route, depth, opts);
  });
}

double interpolated_flag_probability(const ThresholdInstance& inst, std::int64_t depth,
                                     const SolverOptions& opts) {
  check_instance(inst);
  const auto plan = plan_threshold_interpolation(static_cast<int>(inst.input.size()), inst.k, depth, opts);
  if (plan->route.trivial || plan->classical) throw NotApplicable("plan does not sample a flag");
  const BlockEncoding be = plan->route.complement ? complement_block_encoding(inst.input)
                                                  : threshold_block_encoding(inst.input);
  const BlockEncoding t = apply_qsvt(be, plan->poly, opts.cost_multiplier);
  return t.flag_probability(t.basis_state(0));
}

Outcome classical_threshold(const OracleInput& input, int k, QueryLedger& ledger) {
  ledger.record(1, static_cast<std::int64_t>(input.size()));
  return {threshold_value(input, k), true};
}

Outcome solve_threshold_interpolated(const ThresholdInstance& inst, QueryLedger& ledger,
                                     std::uint64_t seed, const SolverOptions& opts) {
  check_instance(inst);
  const int n_items = static_cast<int>(inst.input.size());
  const auto plan = plan_threshold_interpolation(n_items, inst.k, ledger.depth_limit(), opts);
  if (plan->route.trivial) return {0, false};
  if (plan->classical) return classical_threshold(inst.input, inst.k, ledger);

  const BlockEncoding be = plan->route.complement ? complement_block_encoding(inst.input)
                                                  : threshold_block_encoding(inst.input);
  const BlockEncoding t = apply_qsvt(be, plan->poly, opts.cost_multiplier);
  const std::int64_t ones = sample_flag(t, t.basis_state(0), plan->shots, ledger, seed);
  const int above = static_cast<double>(ones) > plan->decision * plan->shots ? 1 : 0;
  return {plan->route.complement ? 1 - above : above, false};
}

PartitionPlan random_partition(int n_items, int bins, std::uint64_t seed) {
  if (bins < 1 || n_items % bins != 0) throw InvalidInput("bin count must divide N");
  std::vector<int> perm(static_cast<std::size_t>(n_items));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  PartitionPlan plan;
  plan.seed = seed;
  const int m = n_items / bins;
  for (int b = 0; b < bins; ++b) {
    plan.bins.emplace_back(perm.begin() + b * m, perm.begin() + (b + 1) * m);
  }
  return plan;
}

std::shared_ptr<const ParallelPlan> plan_threshold_parallel(int n_items, int k, std::int64_t depth,
                                                            const SolverOptions& opts) {
  check_plan_args(n_items, depth, opts);
  const ThresholdRoute route = threshold_route(n_items, k);
  return parallel_memo().get(plan_key(n_items, k, depth, opts), [&] {
    return build_parallel_plan(n_items, route, depth, opts);
  });
}

Outcome solve_threshold_parallel(const ThresholdInstance& inst, QueryLedger& ledger,
                                 std::uint64_t seed, const SolverOptions& opts) {
  check_instance(inst);
  const int n_items = static_cast<int>(inst.input.size());
  const auto plan = plan_threshold_parallel(n_items, inst.k, ledger.depth_limit(), opts);
  if (plan->route.trivial) return {0, false};
  if (plan->classical) return classical_threshold(inst.input, inst.k, ledger);

  const PartitionPlan part = random_partition(n_items, plan->bins, derive_seed(seed, 1));
  Rng rng(derive_seed(seed, 2));
  const std::int64_t circuit = static_cast<std::int64_t>(plan->grover_steps) * opts.cost_multiplier;
  long total = 0;
  std::vector<double> estimates(static_cast<std::size_t>(plan->repetitions));
  for (const auto& bin : part.bins) {
    std::vector<std::uint8_t> bits;
    bits.reserve(bin.size());
    for (int i : bin) bits.push_back(inst.input[static_cast<std::size_t>(i)]);
    const OracleInput sub(std::move(bits));
    const BlockEncoding be = plan->route.complement ? complement_block_encoding(sub)
                                                    : threshold_block_encoding(sub);
    const double a = std::min(1.0, be.scalar_value() * be.scalar_value());
    ledger.record(circuit, plan->repetitions);
    for (double& e : estimates) e = amplitude_estimate(a, plan->grover_steps, rng);
    auto mid = estimates.begin() + estimates.size() / 2;
    std::nth_element(estimates.begin(), mid, estimates.end());
    total += std::lround(*mid * plan->bin_size);
  }
  const int above = total > plan->route.k_eff ? 1 : 0;
  return {plan->route.complement ? 1 - above : above, false};
}

}  // namespace hybridq
