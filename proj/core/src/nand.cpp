#include "hybridq/nand.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>

#include <boost/math/distributions/binomial.hpp>
#include <json.hpp>

#include "hybridq/block_encoding.hpp"
#include "hybridq/errors.hpp"
#include "hybridq/step_families.hpp"
#include "memo.hpp"

namespace hybridq {

namespace {

constexpr double kZeroTol = 1e-9;
// Above this depth the input classes are too many to enumerate and the plan
// falls back to the certified spectral bounds.
constexpr int kExactClassDepth = 4;
constexpr int kSearchDegree = 512;
constexpr int kSearchPoints = 2001;

void check_bits(const NandTree& tree, const Bits& x) {
  if (static_cast<int>(x.size()) != tree.input_count) {
    throw InvalidInput("input length does not match the tree");
  }
  for (auto b : x) {
    if (b > 1) throw InvalidInput("inputs must be bits");
  }
}

Bits leaf_bits(const NandTree& tree, const Bits& x) {
  Bits out(static_cast<std::size_t>(tree.leaves()));
  for (int i = 0; i < tree.leaves(); ++i) out[i] = x[static_cast<std::size_t>(tree.leaf_order[i])];
  return out;
}

// r''-weighted spectral measure of H/3 for one input.
struct Spectrum {
  int phi = 0;
  Eigen::VectorXd lambda;
  Eigen::VectorXd weight;
};

Spectrum spectrum_of(const NandTree& tree, const Bits& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adjacency_matrix(tree, x) / 3.0);
  Spectrum s;
  s.phi = evaluate_classical(tree, x);
  s.lambda = es.eigenvalues();
  s.weight = es.eigenvectors().row(tree.r_double_prime()).transpose().array().square();
  return s;
}

// One leaf pattern per class of trees equal up to swapping siblings; the
// r''-spectrum is invariant under those swaps.
std::vector<Bits> canonical_inputs(int depth) {
  std::vector<Bits> types{{0}, {1}};
  for (int level = 1; level <= depth; ++level) {
    std::vector<Bits> next;
    for (std::size_t i = 0; i < types.size(); ++i) {
      for (std::size_t j = i; j < types.size(); ++j) {
        Bits b = types[i];
        b.insert(b.end(), types[j].begin(), types[j].end());
        next.push_back(std::move(b));
      }
    }
    types = std::move(next);
  }
  return types;
}

std::shared_ptr<const std::vector<Spectrum>> class_spectra(int depth) {
  static detail::Memo<int, std::vector<Spectrum>> memo;
  return memo.get(depth, [depth] {
    const NandTree tree = build_balanced_tree(depth);
    std::vector<Spectrum> out;
    for (const Bits& x : canonical_inputs(depth)) out.push_back(spectrum_of(tree, x));
    return out;
  });
}

struct Separation {
  double yes_low = 0.0;
  double yes_high = 1.0;
};

// Class spectra flattened onto the distinct |λ| values, so each candidate
// polynomial is evaluated once per eigenvalue.
struct ClassTable {
  std::vector<double> points;
  std::vector<int> phi;
  std::vector<std::vector<std::pair<int, double>>> terms;  // (point, weight) per class
};

ClassTable flatten(const std::vector<Spectrum>& classes) {
  std::vector<double> all;
  for (const Spectrum& s : classes) {
    for (Eigen::Index i = 0; i < s.lambda.size(); ++i) {
      if (s.weight(i) > 0.0) all.push_back(std::min(std::abs(s.lambda(i)), 1.0));
    }
  }
  std::sort(all.begin(), all.end());
  ClassTable t;
  for (double v : all) {
    if (t.points.empty() || v - t.points.back() > 1e-12) t.points.push_back(v);
  }
  for (const Spectrum& s : classes) {
    t.phi.push_back(s.phi);
    auto& row = t.terms.emplace_back();
    for (Eigen::Index i = 0; i < s.lambda.size(); ++i) {
      if (s.weight(i) <= 0.0) continue;
      const double v = std::min(std::abs(s.lambda(i)), 1.0);
      const auto it = std::lower_bound(t.points.begin(), t.points.end(), v - 1e-12);
      row.emplace_back(static_cast<int>(it - t.points.begin()), s.weight(i));
    }
  }
  return t;
}

class Calibration {
 public:
  explicit Calibration(int depth) : gap_(nand_spectral_gap(1 << depth)), stop_edge_(gap_) {
    if (depth > kExactClassDepth) return;
    const auto classes = class_spectra(depth);
    table_ = flatten(*classes);
    exact_ = true;
    stop_edge_ = 1.0;
    for (const Spectrum& s : *classes) {
      if (s.phi != 1) continue;
      for (Eigen::Index i = 0; i < s.lambda.size(); ++i) {
        if (s.weight(i) > 1e-18) stop_edge_ = std::min(stop_edge_, std::abs(s.lambda(i)));
      }
    }
  }

  bool exact() const { return exact_; }
  double gap() const { return gap_; }
  double stop_edge() const { return stop_edge_; }

  // Candidate windows are even, so the search checks the positive side only;
  // `both_sides` is for the final certificate.
  Separation separation(const BoundedPolynomial& q, int points, bool both_sides) const {
    Separation s{1.0, 0.0};
    if (exact_) {
      std::vector<double> sq(table_.points.size());
      for (std::size_t i = 0; i < sq.size(); ++i) {
        const double v = clenshaw(q.coeffs, table_.points[i]);
        sq[i] = v * v;
      }
      for (std::size_t c = 0; c < table_.terms.size(); ++c) {
        double p = 0.0;
        for (const auto& [i, w] : table_.terms[c]) p += w * sq[static_cast<std::size_t>(i)];
        if (table_.phi[c] == 0) s.yes_low = std::min(s.yes_low, p);
        else s.yes_high = std::max(s.yes_high, p);
      }
      return s;
    }
    // Φ = 0 puts weight >= 1/2 on the zero eigenvalue; Φ = 1 keeps all weight
    // at |λ| >= gap.
    const double q0 = clenshaw(q.coeffs, 0.0);
    s.yes_low = 0.5 * q0 * q0;
    double leak = extrema_on(q, gap_, 1.0, points).max_abs;
    if (both_sides) leak = std::max(leak, extrema_on(q, -1.0, -gap_, points).max_abs);
    s.yes_high = leak * leak;
    return s;
  }

 private:
  double gap_;
  double stop_edge_;
  bool exact_ = false;
  ClassTable table_;
};

// Kept in floating point: tiny gaps overflow any integer type.
double hoeffding_shots(double gap, double failure) {
  return std::ceil(2.0 * std::log(1.0 / failure) / (gap * gap));
}

std::vector<double> geomspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  return out;
}

struct Candidate {
  std::string family;
  BoundedPolynomial poly;
  double kappa = 0.0;  // interpolated windows are rebuilt on the full grid
  double mu = 0.0;
};

std::optional<BoundedPolynomial> full_window(double gap, int budget) {
  const StepSpec spec{0.25 * gap, 0.125, 0.75 * gap};
  try {
    const double eta = 0.5 * spec.eta;
    // The degree cap makes the probe give up as soon as it passes the budget.
    if (erf_poly_degree(erf_inv(1.0 - eta) / spec.delta, spec.mu, eta, budget) > budget) {
      return std::nullopt;
    }
    return window_poly(spec);
  } catch (const DegreeOverflow&) {
    return std::nullopt;
  }
}

NandPlan build_nand_plan(int depth, std::int64_t depth_limit, const SolverOptions& opts) {
  NandPlan plan;
  plan.depth = depth;
  const int n_leaves = 1 << depth;
  auto classical = [&] {
    plan.classical = true;
    plan.family = "classical";
    plan.poly = BoundedPolynomial{};
    plan.expected_total = n_leaves;
    return plan;
  };
  const std::int64_t max_degree = depth_limit / opts.cost_multiplier;
  if (max_degree < 1) return classical();
  const int budget = static_cast<int>(std::min<std::int64_t>(max_degree, kDegreeCap));
  const Calibration cal(depth);
  plan.exact_classes = cal.exact();

  std::vector<Candidate> candidates;
  if (auto p = full_window(cal.gap(), budget)) candidates.push_back({"full-window", *p});
  const int search = std::min(budget, kSearchDegree);
  if (search >= 2) {
    for (double kappa : geomspace(2.0, 400.0, 16)) {
      for (double mu : geomspace(0.005, 0.4, 14)) {
        candidates.push_back(
            {"interpolated", interpolated_window(kappa, mu, search, kSearchPoints), kappa, mu});
      }
    }
    for (double c : geomspace(0.5 * cal.gap(), 0.4, 20)) {
      candidates.push_back({"damped", damped_window(c, search)});
    }
  }

  const Candidate* best = nullptr;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const Candidate& c : candidates) {
    if (c.poly.degree() < 1) continue;
    const Separation s = cal.separation(c.poly, kSearchPoints, false);
    if (!(s.yes_low > s.yes_high)) continue;
    const double shots = hoeffding_shots(s.yes_low - s.yes_high, opts.failure);
    const double cost = shots * c.poly.degree();
    if (shots <= static_cast<double>(opts.shot_cap) && cost < best_cost) {
      best_cost = cost;
      best = &c;
    }
  }
  if (best == nullptr) return classical();

  plan.family = best->family;
  plan.poly = best->family == "interpolated" ? interpolated_window(best->kappa, best->mu, search)
                                             : best->poly;
  const Separation s = cal.separation(plan.poly, kCertificationPoints, true);
  if (!(s.yes_low > s.yes_high)) return classical();
  plan.yes_low = s.yes_low;
  plan.yes_high = s.yes_high;
  plan.decision = 0.5 * (s.yes_low + s.yes_high);
  const double shots = hoeffding_shots(s.yes_low - s.yes_high, opts.failure);
  if (shots > static_cast<double>(opts.shot_cap)) return classical();
  plan.shots = static_cast<std::int64_t>(shots);
  plan.stop_leakage = extrema_on(plan.poly, cal.stop_edge(), 1.0).max_abs;
  plan.circuit_cost = opts.cost_multiplier * plan.poly.degree();
  plan.expected_total = plan.shots * plan.circuit_cost;
  if (opts.classical_when_cheaper && plan.expected_total >= n_leaves) return classical();
  return plan;
}

void check_options(std::int64_t depth_limit, const SolverOptions& opts) {
  if (depth_limit < 1) throw InvalidBudget("depth limit must be >= 1");
  if (opts.cost_multiplier < 1) throw InvalidInput("cost multiplier must be >= 1");
  if (!(opts.failure > 0.0 && opts.failure < 1.0 / 3.0)) {
    throw InvalidInput("failure budget must lie in (0, 1/3)");
  }
  if (!(opts.subtree_size_factor > 0.0)) throw InvalidInput("subtree size factor must be positive");
}

BlockEncoding transformed_encoding(const NandTree& tree, const Bits& x, const NandPlan& plan,
                                   const SolverOptions& opts) {
  const BlockEncoding be = nand_block_encoding(adjacency_matrix(tree, x), tree.leaves());
  return apply_qsvt(be, plan.poly, opts.cost_multiplier);
}

// Smallest odd r whose majority of r runs, each wrong w.p. <= err, is wrong w.p. <= target.
int majority_repetitions(double err, double target) {
  for (int r = 1; r <= 4001; r += 2) {
    boost::math::binomial_distribution<double> b(r, err);
    if (1.0 - boost::math::cdf(b, (r - 1) / 2) <= target) return r;
  }
  throw InvalidBudget("subtree failure target is out of reach");
}

double majority_failure(int r, double err) {
  if (err <= 0.0) return 0.0;
  boost::math::binomial_distribution<double> b(r, std::min(err, 1.0));
  return 1.0 - boost::math::cdf(b, (r - 1) / 2);
}

struct Subtree {
  NandTree tree;
  Bits input;
};

Subtree subtree(const NandTree& tree, const Bits& x, int sub_depth, int index) {
  const int size = 1 << sub_depth;
  Bits bits(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    bits[i] = x[static_cast<std::size_t>(tree.leaf_order[index * size + i])];
  }
  return {build_balanced_tree(sub_depth), std::move(bits)};
}

}  // namespace

std::string NandTree::to_json() const {
  nlohmann::json j;
  j["depth"] = depth;
  j["leaf_order"] = leaf_order;
  return j.dump();
}

NandTree NandTree::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<int> order;
    if (j.contains("leaf_order")) order = j.at("leaf_order").get<std::vector<int>>();
    return build_balanced_tree(j.at("depth").get<int>(), std::move(order));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad tree descriptor: ") + e.what());
  }
}

NandTree build_balanced_tree(int depth, std::vector<int> leaf_order) {
  if (depth < 1 || depth > kMaxNandDepth) throw InvalidSize("tree depth must lie in [1, 10]");
  NandTree t;
  t.depth = depth;
  const int n = t.leaves();
  if (leaf_order.empty()) {
    leaf_order.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) leaf_order[i] = i;
  }
  if (static_cast<int>(leaf_order.size()) != n) throw InvalidInput("leaf order needs one entry per leaf");
  if (*std::min_element(leaf_order.begin(), leaf_order.end()) < 0) {
    throw InvalidInput("leaf order entries must be nonnegative");
  }
  t.input_count = *std::max_element(leaf_order.begin(), leaf_order.end()) + 1;
  t.leaf_order = std::move(leaf_order);
  t.subtree_sizes.assign(static_cast<std::size_t>(2 * n), 0);
  for (int v = 2 * n - 1; v >= 1; --v) {
    t.subtree_sizes[v] = v >= n ? 1 : t.subtree_sizes[2 * v] + t.subtree_sizes[2 * v + 1];
  }
  return t;
}

int evaluate_classical(const NandTree& tree, const Bits& x) {
  check_bits(tree, x);
  Bits vals = leaf_bits(tree, x);
  while (vals.size() > 1) {
    Bits up(vals.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = 1 - (vals[2 * i] & vals[2 * i + 1]);
    vals = std::move(up);
  }
  return vals[0];
}

Eigen::MatrixXd adjacency_matrix(const NandTree& tree, const Bits& x) {
  check_bits(tree, x);
  const int n = tree.leaves();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(tree.node_count(), tree.node_count());
  for (int v = 2; v < 2 * n; ++v) {
    const int p = v / 2;
    if (v >= n && x[static_cast<std::size_t>(tree.leaf_order[v - n])] == 1) continue;
    const double w = std::pow(static_cast<double>(tree.subtree_sizes[v]) / tree.subtree_sizes[p], 0.25);
    H(v, p) = H(p, v) = w;
  }
  H(1, NandTree::r_prime()) = H(NandTree::r_prime(), 1) = 1.0;
  const double tail = 1.0 / (std::sqrt(2.0) * std::pow(static_cast<double>(n), 0.25));
  H(NandTree::r_prime(), tree.r_double_prime()) = H(tree.r_double_prime(), NandTree::r_prime()) = tail;
  return H;
}

SpectralCertificate spectral_certificate(const Eigen::MatrixXd& H, int phi) {
  if (phi != 0 && phi != 1) throw InvalidInput("phi must be a bit");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::Index last = H.rows() - 1;
  const Eigen::VectorXd& lam = es.eigenvalues();
  SpectralCertificate cert;
  cert.phi_value = phi;
  if (phi == 0) {
    double w = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      if (std::abs(lam(i)) < kZeroTol) w += std::norm(es.eigenvectors()(last, i));
    }
    cert.zero_overlap = std::sqrt(w);
    return cert;
  }
  // Eigenvalues come sorted; group degenerate ones so the overlap is basis-free.
  cert.min_supported_eigenvalue = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < lam.size();) {
    Eigen::Index j = i;
    double w = 0.0;
    while (j < lam.size() && lam(j) - lam(i) < kZeroTol) w += std::norm(es.eigenvectors()(last, j++));
    if (std::sqrt(w) > kZeroTol) {
      cert.min_supported_eigenvalue = std::min(cert.min_supported_eigenvalue, std::abs(lam(i)));
    }
    i = j;
  }
  return cert;
}

double nand_spectral_gap(int n_leaves) { return 1.0 / (54.0 * std::sqrt(2.0 * n_leaves)); }

std::shared_ptr<const NandPlan> plan_nand_interpolated(int depth, std::int64_t depth_limit,
                                                       const SolverOptions& opts) {
  if (depth < 1 || depth > kMaxNandDepth) throw InvalidSize("tree depth must lie in [1, 10]");
  check_options(depth_limit, opts);
  using Key = std::tuple<int, std::int64_t, std::int64_t, double, bool, std::int64_t>;
  static detail::Memo<Key, NandPlan> memo;
  const Key key{depth, depth_limit, opts.cost_multiplier, opts.failure, opts.classical_when_cheaper,
                opts.shot_cap};
  return memo.get(key, [&] { return build_nand_plan(depth, depth_limit, opts); });
}

double nand_yes_probability(const NandTree& tree, const Bits& x, std::int64_t depth_limit,
                            const SolverOptions& opts) {
  const auto plan = plan_nand_interpolated(tree.depth, depth_limit, opts);
  if (plan->classical) throw NotApplicable("plan does not sample a flag");
  const BlockEncoding t = transformed_encoding(tree, x, *plan, opts);
  return t.flag_probability(t.basis_state(tree.r_double_prime()));
}

double nand_error_probability(const NandTree& tree, const Bits& x, std::int64_t depth_limit,
                              const SolverOptions& opts) {
  const auto plan = plan_nand_interpolated(tree.depth, depth_limit, opts);
  if (plan->classical) return 0.0;
  const double p = std::clamp(nand_yes_probability(tree, x, depth_limit, opts), 0.0, 1.0);
  const auto cut = static_cast<std::int64_t>(std::floor(plan->decision * plan->shots));
  boost::math::binomial_distribution<double> b(static_cast<double>(plan->shots), p);
  const double no = boost::math::cdf(b, static_cast<double>(cut));
  return evaluate_classical(tree, x) == 0 ? no : 1.0 - no;
}

Outcome classical_nand(const NandTree& tree, const Bits& x, QueryLedger& ledger) {
  const int value = evaluate_classical(tree, x);
  ledger.record(1, tree.input_count);
  return {value, true};
}

Outcome solve_nand_interpolated(const NandTree& tree, const Bits& x, QueryLedger& ledger,
                                std::uint64_t seed, const SolverOptions& opts) {
  check_bits(tree, x);
  const auto plan = plan_nand_interpolated(tree.depth, ledger.depth_limit(), opts);
  if (plan->classical) return classical_nand(tree, x, ledger);
  const BlockEncoding t = transformed_encoding(tree, x, *plan, opts);
  // Preparing |r''⟩ needs no oracle call.
  const std::int64_t yes = sample_flag(t, t.basis_state(tree.r_double_prime()), plan->shots, ledger, seed);
  return {static_cast<double>(yes) > plan->decision * plan->shots ? 0 : 1, false};
}

NandParallelPlan plan_nand_parallel(int depth, std::int64_t depth_limit, const SolverOptions& opts) {
  if (depth < 1 || depth > kMaxNandDepth) throw InvalidSize("tree depth must lie in [1, 10]");
  check_options(depth_limit, opts);
  NandParallelPlan plan;
  const int n_leaves = 1 << depth;
  const double cap = opts.subtree_size_factor * static_cast<double>(depth_limit) * depth_limit;
  if (cap >= n_leaves) {
    plan.delegated = true;
    plan.subtree_depth = depth;
    plan.subtree_plan = plan_nand_interpolated(depth, depth_limit, opts);
    plan.per_subtree_target = opts.failure;
    return plan;
  }
  plan.subtree_depth = cap < 2.0 ? 0 : std::bit_width(static_cast<unsigned>(cap)) - 1;
  plan.subtrees = n_leaves >> plan.subtree_depth;
  plan.per_subtree_target = 1.0 / (3.0 * plan.subtrees);
  if (plan.subtree_depth == 0) return plan;
  plan.subtree_plan = plan_nand_interpolated(plan.subtree_depth, depth_limit, opts);
  if (!plan.subtree_plan->classical) {
    plan.repetitions = majority_repetitions(opts.failure, plan.per_subtree_target);
  }
  return plan;
}

Outcome solve_nand_parallel(const NandTree& tree, const Bits& x, QueryLedger& ledger,
                            std::uint64_t seed, const SolverOptions& opts) {
  check_bits(tree, x);
  const NandParallelPlan plan = plan_nand_parallel(tree.depth, ledger.depth_limit(), opts);
  if (plan.delegated) return solve_nand_interpolated(tree, x, ledger, seed, opts);

  Bits values(static_cast<std::size_t>(plan.subtrees));
  bool fallback = false;
  for (int t = 0; t < plan.subtrees; ++t) {
    QueryLedger sub_ledger(ledger.depth_limit());
    if (plan.subtree_depth == 0) {
      sub_ledger.record(1);
      values[t] = x[static_cast<std::size_t>(tree.leaf_order[t])];
      fallback = true;
    } else {
      const Subtree sub = subtree(tree, x, plan.subtree_depth, t);
      int ones = 0;
      for (int j = 0; j < plan.repetitions; ++j) {
        const Outcome o = solve_nand_interpolated(sub.tree, sub.input, sub_ledger,
                                                  derive_seed(seed, t, j), opts);
        ones += o.answer;
        fallback = fallback || o.fallback;
      }
      values[t] = 2 * ones > plan.repetitions ? 1 : 0;
    }
    ledger.merge(sub_ledger);
  }
  // The upper tree sees only subtree values, so completing it costs no queries.
  while (values.size() > 1) {
    Bits up(values.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = 1 - (values[2 * i] & values[2 * i + 1]);
    values = std::move(up);
  }
  return {values[0], fallback};
}

double nand_parallel_success_bound(const NandTree& tree, const Bits& x, std::int64_t depth_limit,
                                   const SolverOptions& opts) {
  check_bits(tree, x);
  const NandParallelPlan plan = plan_nand_parallel(tree.depth, depth_limit, opts);
  if (plan.delegated) return 1.0 - nand_error_probability(tree, x, depth_limit, opts);
  if (plan.subtree_depth == 0) return 1.0;
  double success = 1.0;
  for (int t = 0; t < plan.subtrees; ++t) {
    const Subtree sub = subtree(tree, x, plan.subtree_depth, t);
    const double err = nand_error_probability(sub.tree, sub.input, depth_limit, opts);
    success *= 1.0 - majority_failure(plan.repetitions, err);
  }
  return success;
}

}  // namespace hybridq
