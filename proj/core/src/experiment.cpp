#include "hybridq/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hybridq/block_encoding.hpp"
#include "hybridq/errors.hpp"
#include "hybridq/nand.hpp"
#include "hybridq/random.hpp"
#include "hybridq/symmetric.hpp"
#include "hybridq/threshold.hpp"

namespace hybridq {

namespace {

std::vector<std::uint8_t> draw_input(const SweepConfig& cfg, int n, int k, int trial, Rng& rng) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
  if (cfg.inputs == "boundary") {
    const int w = std::min(n, k + trial % 2);
    std::fill(bits.begin(), bits.begin() + w, 1);
    std::shuffle(bits.begin(), bits.end(), rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (auto& b : bits) b = coin(rng) ? 1 : 0;
  }
  return bits;
}

SymmetricFunction symmetric_function(const SweepConfig& cfg, int n) {
  if (!cfg.table.empty()) {
    if (static_cast<int>(cfg.table.size()) != n + 1) throw InvalidInput("table needs N + 1 entries");
    return SymmetricFunction{cfg.table};
  }
  if (cfg.function == "parity") return SymmetricFunction::parity(n);
  if (cfg.function == "majority") return SymmetricFunction::majority(n);
  throw InvalidInput("unknown symmetric function: " + cfg.function);
}

ExperimentRecord run_one(const SweepConfig& cfg, int cell, int n, int k, std::int64_t depth,
                         Strategy strategy, int trial) {
  ExperimentRecord r;
  r.problem = cfg.problem;
  r.n = n;
  r.k = k;
  r.depth_limit = depth;
  r.strategy = strategy;
  r.trial = trial;
  r.cell = cell;
  r.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(trial));

  Rng input_rng(mix64(r.seed));
  const auto bits = draw_input(cfg, n, k, trial, input_rng);
  SolverOptions opts;
  opts.cost_multiplier = cfg.cost_multiplier;
  opts.subtree_size_factor = cfg.subtree_size_factor;
  QueryLedger ledger(depth);
  Outcome out;

  switch (cfg.problem) {
    case Problem::Threshold: {
      const ThresholdInstance inst{OracleInput(bits), k};
      r.truth = threshold_value(inst.input, k);
      out = strategy == Strategy::Interpolate ? solve_threshold_interpolated(inst, ledger, r.seed, opts)
                                              : solve_threshold_parallel(inst, ledger, r.seed, opts);
      break;
    }
    case Problem::Symmetric: {
      const SymmetricFunction f = symmetric_function(cfg, n);
      const OracleInput input(bits);
      r.k = gamma_of(f);
      r.truth = f(input.weight());
      out = solve_symmetric(f, input, ledger, r.seed, cfg.alpha, opts);
      break;
    }
    case Problem::Nand: {
      const NandTree tree = build_balanced_tree(std::countr_zero(static_cast<unsigned>(n)));
      r.k = tree.depth;
      r.truth = evaluate_classical(tree, bits);
      out = strategy == Strategy::Interpolate ? solve_nand_interpolated(tree, bits, ledger, r.seed, opts)
                                              : solve_nand_parallel(tree, bits, ledger, r.seed, opts);
      break;
    }
  }
  r.answer = out.answer;
  r.fallback = out.fallback;
  r.correct = r.answer == r.truth;
  r.total_queries = ledger.total();
  r.max_coherent = ledger.max_coherent();
  r.circuits = ledger.circuits();
  if (r.max_coherent > depth) throw std::logic_error("record exceeds its depth limit");
  return r;
}

double field_of(const ExperimentRecord& r, const std::string& name) {
  if (name == "n") return r.n;
  if (name == "k") return r.k;
  if (name == "depth_limit") return static_cast<double>(r.depth_limit);
  if (name == "total_queries") return static_cast<double>(r.total_queries);
  if (name == "max_coherent") return static_cast<double>(r.max_coherent);
  if (name == "circuits") return static_cast<double>(r.circuits);
  throw InvalidInput("unknown record field: " + name);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

nlohmann::json record_json(const ExperimentRecord& r) {
  return {{"problem", to_string(r.problem)}, {"n", r.n}, {"k", r.k}, {"depth_limit", r.depth_limit},
          {"strategy", to_string(r.strategy)}, {"trial", r.trial}, {"answer", r.answer},
          {"truth", r.truth}, {"correct", r.correct}, {"total_queries", r.total_queries},
          {"max_coherent", r.max_coherent}, {"circuits", r.circuits}, {"seed", r.seed},
          {"fallback", r.fallback}};
}

}  // namespace

std::string to_string(Problem p) {
  switch (p) {
    case Problem::Threshold: return "threshold";
    case Problem::Symmetric: return "symmetric";
    case Problem::Nand: return "nand";
  }
  return "";
}

std::string to_string(Strategy s) { return s == Strategy::Interpolate ? "interpolate" : "parallel"; }

Problem parse_problem(const std::string& text) {
  if (text == "threshold") return Problem::Threshold;
  if (text == "symmetric") return Problem::Symmetric;
  if (text == "nand") return Problem::Nand;
  throw InvalidInput("unknown problem: " + text);
}

Strategy parse_strategy(const std::string& text) {
  if (text == "interpolate") return Strategy::Interpolate;
  if (text == "parallel") return Strategy::Parallel;
  throw InvalidInput("unknown strategy: " + text);
}

void SweepConfig::validate() const {
  if (sizes.empty() || ks.empty() || depths.empty() || strategies.empty()) {
    throw InvalidInput("sweep lists must be nonempty");
  }
  if (trials < 1) throw InvalidInput("trials must be >= 1");
  if (cost_multiplier < 1) throw InvalidInput("cost multiplier must be >= 1");
  for (int n : sizes) {
    if (n < 2 || !std::has_single_bit(static_cast<unsigned>(n))) {
      throw InvalidInput("sizes must be powers of two >= 2");
    }
  }
  for (std::int64_t d : depths) {
    if (d < 1) throw InvalidInput("depth limits must be >= 1");
  }
  if (problem == Problem::Threshold) {
    for (int k : ks) {
      if (k < 0) throw InvalidInput("threshold k must be nonnegative");
    }
  }
  if (problem == Problem::Symmetric) {
    if (std::find(strategies.begin(), strategies.end(), Strategy::Parallel) != strategies.end()) {
      throw InvalidInput("the symmetric solver has no parallel strategy");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in [0, 1]");
  }
  if (!inputs.empty() && inputs != "boundary" && inputs != "uniform") {
    throw InvalidInput("inputs must be boundary or uniform");
  }
  if (inputs == "boundary" && problem != Problem::Threshold) {
    throw InvalidInput("boundary inputs apply to threshold sweeps only");
  }
}

SweepConfig SweepConfig::from_json(const std::string& text) {
  SweepConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.problem = parse_problem(j.at("problem").get<std::string>());
    c.sizes = j.at("sizes").get<std::vector<int>>();
    if (j.contains("ks")) c.ks = j.at("ks").get<std::vector<int>>();
    c.depths = j.at("depths").get<std::vector<std::int64_t>>();
    if (j.contains("strategies")) {
      c.strategies.clear();
      for (const auto& s : j.at("strategies")) c.strategies.push_back(parse_strategy(s.get<std::string>()));
    }
    c.trials = j.value("trials", 1);
    c.seed = j.value("seed", std::uint64_t{0});
    c.out = j.value("out", std::string{});
    c.cost_multiplier = j.value("cost_multiplier", std::int64_t{1});
    c.alpha = j.value("alpha", 1.0);
    c.function = j.value("function", std::string{"majority"});
    if (j.contains("table")) c.table = SymmetricFunction::from_json(j.at("table").dump()).table;
    c.subtree_size_factor = j.value("subtree_size_factor", 1.0);
    c.inputs = j.value("inputs", std::string{c.problem == Problem::Threshold ? "boundary" : "uniform"});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad sweep config: ") + e.what());
  }
  c.validate();
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return SweepConfig::from_json(ss.str());
}

std::vector<ExperimentRecord> run_sweep(const SweepConfig& config) {
  SweepConfig cfg = config;
  if (cfg.inputs.empty()) cfg.inputs = cfg.problem == Problem::Threshold ? "boundary" : "uniform";
  cfg.validate();
  if (cfg.problem != Problem::Threshold) cfg.ks = {0};

  std::vector<ExperimentRecord> records;
  int cell = 0;
  for (int n : cfg.sizes) {
    for (int k : cfg.ks) {
      for (std::int64_t depth : cfg.depths) {
        for (Strategy s : cfg.strategies) {
          for (int t = 0; t < cfg.trials; ++t) records.push_back(run_one(cfg, cell, n, k, depth, s, t));
          ++cell;
        }
      }
    }
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.cell, a.trial) < std::tie(b.cell, b.trial);
  });
  return records;
}

void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << to_string(r.problem) << ',' << r.n << ',' << r.k << ',' << r.depth_limit << ','
       << to_string(r.strategy) << ',' << r.trial << ',' << r.answer << ',' << r.truth << ','
       << (r.correct ? 1 : 0) << ',' << r.total_queries << ',' << r.max_coherent << ','
       << r.circuits << ',' << r.seed << ',' << (r.fallback ? 1 : 0) << '\n';
  }
}

void write_json(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : records) j.push_back(record_json(r));
  os << j.dump(2) << '\n';
}

void write_records(const std::string& path, const std::string& format,
                   const std::vector<ExperimentRecord>& records) {
  if (format != "csv" && format != "json") throw InvalidInput("format must be csv or json");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  if (format == "csv") write_csv(out, records);
  else write_json(out, records);
  if (!out) throw IoError("write failed for " + path);
}

std::vector<ExperimentRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw InvalidInput("missing or unexpected CSV header");
  std::vector<ExperimentRecord> out;
  std::map<std::tuple<int, int, std::int64_t, int, int>, int> cells;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 14) throw InvalidInput("CSV row needs 14 fields: " + line);
    try {
      ExperimentRecord r;
      r.problem = parse_problem(f[0]);
      r.n = std::stoi(f[1]);
      r.k = std::stoi(f[2]);
      r.depth_limit = std::stoll(f[3]);
      r.strategy = parse_strategy(f[4]);
      r.trial = std::stoi(f[5]);
      r.answer = std::stoi(f[6]);
      r.truth = std::stoi(f[7]);
      r.correct = f[8] == "1";
      r.total_queries = std::stoll(f[9]);
      r.max_coherent = std::stoll(f[10]);
      r.circuits = std::stoll(f[11]);
      r.seed = std::stoull(f[12]);
      r.fallback = f[13] == "1";
      const auto key = std::make_tuple(static_cast<int>(r.problem), r.n, r.depth_limit, r.k,
                                       static_cast<int>(r.strategy));
      r.cell = cells.emplace(key, static_cast<int>(cells.size())).first->second;
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw InvalidInput("bad CSV row: " + line);
    }
  }
  return out;
}

std::vector<ExperimentRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  return read_csv(in);
}

std::vector<std::pair<double, double>> median_by(const std::vector<ExperimentRecord>& records,
                                                 const std::string& x_field,
                                                 const std::string& y_field) {
  std::map<double, std::vector<double>> groups;
  for (const auto& r : records) {
    if (!r.fallback) groups[field_of(r, x_field)].push_back(field_of(r, y_field));
  }
  std::vector<std::pair<double, double>> out;
  for (auto& [x, ys] : groups) out.emplace_back(x, median(std::move(ys)));
  return out;
}

ScalingFit fit_scaling_exponent(const std::vector<ExperimentRecord>& records,
                                const std::string& x_field, const std::string& y_field) {
  ScalingFit fit;
  fit.excluded_fallback = static_cast<int>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.fallback; }));
  const auto pts = median_by(records, x_field, y_field);
  if (pts.size() < 3) throw InsufficientData("scaling fit needs at least three distinct x values");
  std::vector<double> lx, ly;
  for (const auto& [x, y] : pts) {
    if (!(x > 0.0 && y > 0.0)) throw InvalidInput("log-log fit needs positive values");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  fit.points = static_cast<int>(lx.size());
  return fit;
}

double fisher_information(double pi, double grover_steps, double samples) {
  if (!(pi > 0.0 && pi < 1.0)) throw Singular("Fisher information is singular at pi = 0 or 1");
  const double m = 1.0 + 2.0 * grover_steps;
  return samples * m * m / (pi * (1.0 - pi));
}

}  // namespace hybridq
