// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/distributions/binomial.hpp>

#include "hybridq/block_encoding.hpp"
#include "hybridq/chebyshev.hpp"
#include "hybridq/errors.hpp"
#include "hybridq/experiment.hpp"
#include "hybridq/nand.hpp"
#include "hybridq/symmetric.hpp"
#include "hybridq/threshold.hpp"

using namespace hybridq;

namespace {

constexpr double kBlockTol = 1e-10;
constexpr double kOverlapTol = 1e-9;
constexpr double kSlopeLo = 0.8, kSlopeHi = 1.2;
constexpr double kScalingLo = -1.3, kScalingHi = -0.7;
constexpr int kTrials = 99;
constexpr double kBinomialAlpha = 0.01;
constexpr double kHalvingE = 0.05;
constexpr int kHalvingRuns = 1000;
constexpr double kFisherTol = 1e-6;

struct Result {
  bool pass = false;
  std::string detail;
};

// Every ledger the suite creates is audited here for criterion 5.
struct Soundness {
  std::int64_t ledgers = 0;
  std::int64_t over_depth = 0;
  std::int64_t escapes = 0;

  void audit(const QueryLedger& l) {
    ++ledgers;
    over_depth += l.max_coherent() > l.depth_limit();
  }
  void audit(const ExperimentRecord& r) {
    ++ledgers;
    over_depth += r.max_coherent > r.depth_limit;
  }
} g_sound;

Bits bits_of(int n, unsigned mask) {
  Bits b(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) b[i] = (mask >> i) & 1u;
  return b;
}

double slope(const std::vector<std::pair<double, double>>& pts) {
  double mx = 0, my = 0;
  for (auto [x, y] : pts) {
    mx += std::log(x) / pts.size();
    my += std::log(y) / pts.size();
  }
  double sxy = 0, sxx = 0;
  for (auto [x, y] : pts) {
    sxy += (std::log(x) - mx) * (std::log(y) - my);
    sxx += (std::log(x) - mx) * (std::log(x) - mx);
  }
  return sxy / sxx;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Result block_exactness() {
  double worst = 0;
  int cases = 0;
  for (int n : {2, 4, 8, 16}) {
    for (unsigned m = 0; m < (1u << n); ++m) {
      const OracleInput x(bits_of(n, m));
      const BlockEncoding be = threshold_block_encoding(x);
      const CMatrix blk = be.left_projector().matrix().cast<Complex>() * be.unitary() *
                          be.right_projector().matrix().cast<Complex>();
      worst = std::max(worst, std::abs(blk.norm() - std::sqrt(static_cast<double>(x.weight()) / n)));
      ++cases;
    }
  }
  return {worst <= kBlockTol, fmt("%d inputs, max |block - sqrt(|x|/N)| = %.2e", cases, worst)};
}

Result polynomial_certificates() {
  const double lo = std::sqrt(4.0 / 64), hi = std::sqrt(5.0 / 64);
  const double threshold_delta = 0.5 * (hi - lo);
  const std::vector<double> deltas{0.2, 0.1, 0.05, threshold_delta};
  const std::vector<double> etas{0.125, 0.0625, 0.01};
  int passed = 0, total = 0;
  std::vector<std::pair<double, double>> degrees;
  for (double d : deltas) {
    const double mu = d == threshold_delta ? 0.5 * (lo + hi) : 0.3;
    for (double eta : etas) {
      const StepSpec spec{d, eta, mu};
      const BoundedPolynomial step = step_poly(spec);
      passed += certify_bounds(step, spec, BoundKind::Step).pass;
      passed += certify_bounds(window_poly(spec), spec, BoundKind::Window).pass;
      total += 2;
      if (eta == 0.125) degrees.emplace_back(1.0 / d, step.degree());
    }
  }
  const double s = slope(degrees);
  return {passed == total && s >= kSlopeLo && s <= kSlopeHi,
          fmt("%d/%d certified, degree vs 1/delta slope %.3f", passed, total, s)};
}

Result spectral_certificates() {
  int cases = 0, bad = 0;
  double min_overlap = 1, min_ratio = 1e9;
  for (int d = 1; d <= 3; ++d) {
    const NandTree t = build_balanced_tree(d);
    const int n = t.leaves();
    const double bound = 1.0 / (18.0 * std::sqrt(2.0 * n));
    for (unsigned m = 0; m < (1u << n); ++m) {
      const Bits x = bits_of(n, m);
      const int phi = evaluate_classical(t, x);
      const auto c = spectral_certificate(adjacency_matrix(t, x), phi);
      ++cases;
      if (phi == 0) {
        min_overlap = std::min(min_overlap, c.zero_overlap);
        bad += c.zero_overlap < 1.0 / std::sqrt(2.0) - kOverlapTol;
      } else {
        min_ratio = std::min(min_ratio, c.min_supported_eigenvalue / bound);
        bad += c.min_supported_eigenvalue < bound;
      }
    }
  }
  return {bad == 0, fmt("%d cases, min zero overlap %.4f, min supported |lambda| / bound %.3f", cases,
                        min_overlap, min_ratio)};
}

// Rejects "success >= 2/3" when P(Bin(99, 2/3) <= hits) < 0.01.
bool binomial_ok(int hits) {
  boost::math::binomial_distribution<double> b(kTrials, 2.0 / 3.0);
  return boost::math::cdf(b, hits) >= kBinomialAlpha;
}

struct Tally {
  int instances = 0;
  int rejected = 0;
  int min_hits = kTrials;

  void add(int hits) {
    ++instances;
    rejected += !binomial_ok(hits);
    min_hits = std::min(min_hits, hits);
  }
  std::string str(const char* name) const {
    return fmt("%s %d inst, %d rejected, min %d/%d", name, instances, rejected, min_hits, kTrials);
  }
};

template <class Solve>
int trial_hits(std::int64_t depth, int truth, Solve&& solve) {
  int hits = 0;
  for (int t = 0; t < kTrials; ++t) {
    QueryLedger ledger(depth);
    hits += solve(ledger, static_cast<std::uint64_t>(t)) == truth;
    g_sound.audit(ledger);
  }
  return hits;
}

Result solver_correctness() {
  Tally thr_i, thr_p, nand_i, nand_p, sym;
  for (unsigned m = 0; m < 256; ++m) {
    const OracleInput x(bits_of(8, m));
    for (int k = 0; k < 8; ++k) {
      const ThresholdInstance inst{x, k};
      const int truth = threshold_value(x, k);
      const std::uint64_t base = derive_seed(m, k);
      thr_i.add(trial_hits(8, truth, [&](QueryLedger& l, std::uint64_t t) {
        return solve_threshold_interpolated(inst, l, derive_seed(base, t)).answer;
      }));
      thr_p.add(trial_hits(8, truth, [&](QueryLedger& l, std::uint64_t t) {
        return solve_threshold_parallel(inst, l, derive_seed(base, t)).answer;
      }));
    }
  }
  SolverOptions narrow;
  narrow.subtree_size_factor = 1.0 / 64;
  for (int d = 1; d <= 3; ++d) {
    const NandTree tree = build_balanced_tree(d);
    for (unsigned m = 0; m < (1u << tree.leaves()); ++m) {
      const Bits x = bits_of(tree.leaves(), m);
      const int truth = evaluate_classical(tree, x);
      const std::uint64_t base = derive_seed(100 + d, m);
      nand_i.add(trial_hits(64, truth, [&](QueryLedger& l, std::uint64_t t) {
        return solve_nand_interpolated(tree, x, l, derive_seed(base, t)).answer;
      }));
      nand_p.add(trial_hits(16, truth, [&](QueryLedger& l, std::uint64_t t) {
        return solve_nand_parallel(tree, x, l, derive_seed(base, t), narrow).answer;
      }));
    }
  }
  for (int n : {4, 8}) {
    for (const SymmetricFunction& f : {SymmetricFunction::parity(n), SymmetricFunction::majority(n)}) {
      for (unsigned m = 0; m < (1u << n); ++m) {
        const OracleInput x(bits_of(n, m));
        const std::uint64_t base = derive_seed(200 + n, m, f(0) + 2 * f(n));
        sym.add(trial_hits(16, f(x.weight()), [&](QueryLedger& l, std::uint64_t t) {
          return solve_symmetric(f, x, l, derive_seed(base, t), 1.0).answer;
        }));
      }
    }
  }
  const bool pass = thr_i.rejected + thr_p.rejected + nand_i.rejected + nand_p.rejected + sym.rejected == 0;
  return {pass, thr_i.str("threshold-interp") + "; " + thr_p.str("threshold-par") + "; " +
                    nand_i.str("nand-interp") + "; " + nand_p.str("nand-par") + "; " + sym.str("symmetric")};
}

std::vector<ExperimentRecord> audited_sweep(const SweepConfig& c) {
  auto recs = run_sweep(c);
  for (const auto& r : recs) g_sound.audit(r);
  return recs;
}

std::string medians(const std::vector<ExperimentRecord>& recs) {
  std::map<std::int64_t, std::vector<double>> by;
  for (const auto& r : recs) by[r.depth_limit].push_back(static_cast<double>(r.total_queries));
  std::string s;
  for (auto& [d, v] : by) {
    std::sort(v.begin(), v.end());
    s += fmt(" D=%lld:%.0f", static_cast<long long>(d), v[v.size() / 2]);
  }
  return s;
}

Result interpolation_scaling() {
  SweepConfig nand;
  nand.problem = Problem::Nand;
  nand.sizes = {16};
  nand.depths = {16, 32, 64};
  nand.trials = 15;
  nand.seed = 6;
  SweepConfig thr;
  thr.sizes = {256};
  thr.ks = {4};
  thr.depths = {8, 16, 32};
  thr.trials = 15;
  thr.seed = 6;

  bool pass = true;
  std::string detail;
  for (auto [name, cfg] : {std::pair{"nand d=4", nand}, std::pair{"threshold N=256 k=4", thr}}) {
    const auto recs = audited_sweep(cfg);
    detail += std::string(detail.empty() ? "" : "; ") + name + medians(recs);
    try {
      const ScalingFit fit = fit_scaling_exponent(recs, "depth_limit", "total_queries");
      const bool ok = fit.slope >= kScalingLo && fit.slope <= kScalingHi;
      pass = pass && ok;
      detail += fmt(" slope %.3f (%d pts, %d fallback)", fit.slope, fit.points, fit.excluded_fallback);
    } catch (const InsufficientData& e) {
      pass = false;
      detail += std::string(" no fit: ") + e.what();
    }
  }
  return {pass, detail};
}

double median_total(const std::vector<ExperimentRecord>& recs, Strategy s) {
  std::vector<double> v;
  for (const auto& r : recs)
    if (r.strategy == s) v.push_back(static_cast<double>(r.total_queries));
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Result strategy_ordering() {
  bool pass = true;
  std::string detail;
  for (std::int64_t d : {4, 8, 16}) {
    SweepConfig c;
    c.sizes = {256};
    c.ks = {8};
    c.depths = {d};
    c.strategies = {Strategy::Interpolate, Strategy::Parallel};
    c.trials = 11;
    c.seed = 7;
    const auto recs = audited_sweep(c);
    const double i = median_total(recs, Strategy::Interpolate), p = median_total(recs, Strategy::Parallel);
    pass = pass && p < i;
    detail += fmt("threshold D=%lld par %.0f < interp %.0f; ", static_cast<long long>(d), p, i);
  }
  // c_p = 1 delegates at D = 4; the narrow factor forces a real partition at D = 32.
  for (auto [d, cp] : {std::pair<std::int64_t, double>{4, 1.0}, {32, 1.0 / 256}}) {
    SweepConfig c;
    c.problem = Problem::Nand;
    c.sizes = {16};
    c.depths = {d};
    c.strategies = {Strategy::Interpolate, Strategy::Parallel};
    c.trials = 11;
    c.seed = 7;
    c.subtree_size_factor = cp;
    const auto recs = audited_sweep(c);
    const double i = median_total(recs, Strategy::Interpolate), p = median_total(recs, Strategy::Parallel);
    pass = pass && i <= p;
    detail += fmt("nand D=%lld c_p=%g interp %.0f <= par %.0f; ", static_cast<long long>(d), cp, i, p);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Result window_halving() {
  const OracleInput x(bits_of(16, 0b1011000001000010));  // |x| = 5
  const BlockEncoding be = threshold_block_encoding(x);
  const double z = be.scalar_value();
  const double sigma = std::sqrt(kHalvingE * (1 - kHalvingE) / kHalvingRuns);
  const double floor_rate = 1 - kHalvingE - 3 * sigma;
  bool pass = true;
  std::string detail = fmt("floor %.4f:", floor_rate);
  Rng rng(8);
  for (double w : {0.2, 0.1, 0.05}) {
    std::uniform_real_distribution<double> offset(-0.45 * w, 0.45 * w);
    int kept = 0, not_halved = 0;
    for (int run = 0; run < kHalvingRuns; ++run) {
      const double c = z + offset(rng);
      QueryLedger ledger(1'000'000);
      const WeightWindow out = cut_in_half(be, {c - w / 2, c + w / 2}, kHalvingE, ledger, rng);
      g_sound.audit(ledger);
      kept += out.contains(z);
      not_halved += std::abs(out.width() - w / 2) > 1e-12;
    }
    const double rate = static_cast<double>(kept) / kHalvingRuns;
    pass = pass && not_halved == 0 && rate >= floor_rate;
    detail += fmt(" W=%g kept %.3f halved %d/%d;", w, rate, kHalvingRuns - not_halved, kHalvingRuns);
  }
  detail.pop_back();
  return {pass, detail};
}

double numeric_fisher(double pi, int k, double l) {
  auto p1 = [k](double q) {
    const double s = std::sin((1 + 2 * k) * std::asin(std::sqrt(q)));
    return s * s;
  };
  const double h = 1e-5;
  const double d = (-p1(pi + 2 * h) + 8 * p1(pi + h) - 8 * p1(pi - h) + p1(pi - 2 * h)) / (12 * h);
  const double p = p1(pi);
  return l * (d * d / p + d * d / (1 - p));
}

Result fisher_grid() {
  double worst = 0;
  for (double pi : {0.13, 0.29, 0.47, 0.61, 0.83}) {
    for (int k = 0; k < 5; ++k) {
      const double exact = fisher_information(pi, k, 7);
      worst = std::max(worst, std::abs(numeric_fisher(pi, k, 7) / exact - 1));
    }
  }
  return {worst <= kFisherTol, fmt("25 grid points, max relative error %.2e", worst)};
}

Result depth_soundness() {
  if (g_sound.ledgers == 0) solver_correctness();
  return {g_sound.over_depth == 0 && g_sound.escapes == 0,
          fmt("%lld ledgers audited, %lld over depth, %lld DepthExceeded escapes",
              static_cast<long long>(g_sound.ledgers), static_cast<long long>(g_sound.over_depth),
              static_cast<long long>(g_sound.escapes))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "Comma-separated criterion numbers")->delimiter(',')->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"block-encoding exactness", block_exactness},
      {"polynomial certificates", polynomial_certificates},
      {"spectral certificate", spectral_certificates},
      {"solver correctness at 2/3", solver_correctness},
      {"depth-budget soundness", depth_soundness},
      {"interpolation scaling", interpolation_scaling},
      {"strategy ordering", strategy_ordering},
      {"window halving", window_halving},
      {"Fisher information", fisher_grid},
  };
  std::set<int> selected(only.begin(), only.end());
  if (selected.empty())
    for (int i = 1; i <= 9; ++i) selected.insert(i);
  // Soundness audits everything else, so it reports last.
  std::vector<int> order;
  for (int i : selected)
    if (i != 5) order.push_back(i);
  if (selected.count(5)) order.push_back(5);

  int failed = 0;
  for (int i : order) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i - 1].second();
    } catch (const DepthExceeded& e) {
      ++g_sound.escapes;
      r = {false, std::string("DepthExceeded: ") + e.what()};
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d %s (%.1fs): %s\n", r.pass ? "PASS" : "FAIL", i, criteria[i - 1].first.c_str(), secs,
                r.detail.c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 1;
}
