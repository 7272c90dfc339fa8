// hybridq: depth-limited query solvers, sweeps and scaling fits.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridq/errors.hpp"
#include "hybridq/experiment.hpp"
#include "hybridq/symmetric.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kInvariantError = 2;

struct RunFlags {
  int n = 8;
  int k = 1;
  std::int64_t depth = 8;
  std::string strategy = "interpolate";
  int trials = 1;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  std::string function = "majority";
  std::string table;
  double subtree_factor = 1.0;
  std::string inputs;
  std::string out;
  std::string format = "csv";
  std::int64_t cost_multiplier = 1;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hybridq::IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::vector<hybridq::ExperimentRecord>& records, const std::string& out,
          const std::string& format) {
  if (!out.empty()) {
    hybridq::write_records(out, format, records);
  } else if (format == "json") {
    hybridq::write_json(std::cout, records);
  } else {
    hybridq::write_csv(std::cout, records);
  }
  int correct = 0;
  for (const auto& r : records) correct += r.correct ? 1 : 0;
  std::fprintf(stderr, "%zu records, %d correct\n", records.size(), correct);
}

void add_run_flags(CLI::App* cmd, RunFlags& f, hybridq::Problem problem) {
  cmd->add_option("--n", f.n, "Input size N (power of two)");
  if (problem == hybridq::Problem::Threshold) cmd->add_option("--k", f.k, "Threshold: answer 1 iff |x| > k");
  cmd->add_option("--depth", f.depth, "Coherent depth limit D");
  if (problem != hybridq::Problem::Symmetric) {
    cmd->add_option("--strategy", f.strategy, "interpolate | parallel")
        ->check(CLI::IsMember({"interpolate", "parallel"}));
  }
  cmd->add_option("--trials", f.trials, "Seeded trials");
  cmd->add_option("--seed", f.seed, "Base seed");
  if (problem == hybridq::Problem::Symmetric) {
    cmd->add_option("--alpha", f.alpha, "Interpolation exponent in [0, 1]");
    cmd->add_option("--function", f.function, "parity | majority")
        ->check(CLI::IsMember({"parity", "majority"}));
    cmd->add_option("--table", f.table, "JSON file with f(0..N) as 0/1");
  }
  if (problem == hybridq::Problem::Nand) {
    cmd->add_option("--subtree-factor", f.subtree_factor, "Parallel subtrees hold <= c D^2 leaves");
  }
  cmd->add_option("--inputs", f.inputs, "boundary | uniform");
  cmd->add_option("--out", f.out, "Write records here instead of stdout");
  cmd->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--cost-multiplier", f.cost_multiplier, "Oracle calls per polynomial degree unit");
}

hybridq::SweepConfig single_cell(const RunFlags& f, hybridq::Problem problem) {
  hybridq::SweepConfig c;
  c.problem = problem;
  c.sizes = {f.n};
  c.ks = {f.k};
  c.depths = {f.depth};
  c.strategies = {hybridq::parse_strategy(f.strategy)};
  c.trials = f.trials;
  c.seed = f.seed;
  c.cost_multiplier = f.cost_multiplier;
  c.alpha = f.alpha;
  c.function = f.function;
  if (!f.table.empty()) c.table = hybridq::SymmetricFunction::from_json(slurp(f.table)).table;
  c.subtree_size_factor = f.subtree_factor;
  c.inputs = f.inputs;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-limited quantum query solvers"};
  app.require_subcommand(1);

  RunFlags thr, sym, nand;
  auto* thr_cmd = app.add_subcommand("threshold", "Threshold_k over seeded inputs");
  add_run_flags(thr_cmd, thr, hybridq::Problem::Threshold);
  auto* sym_cmd = app.add_subcommand("symmetric", "Symmetric Boolean function over seeded inputs");
  add_run_flags(sym_cmd, sym, hybridq::Problem::Symmetric);
  auto* nand_cmd = app.add_subcommand("nand", "Balanced NAND tree with N leaves");
  add_run_flags(nand_cmd, nand, hybridq::Problem::Nand);

  std::string config_path, sweep_out, sweep_format;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a JSON sweep configuration");
  sweep_cmd->add_option("--config", config_path, "Sweep config JSON")->required();
  sweep_cmd->add_option("--out", sweep_out, "Overrides the config's output path");
  sweep_cmd->add_option("--format", sweep_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  std::string records_path, x_field = "depth_limit", y_field = "total_queries";
  auto* fit_cmd = app.add_subcommand("fit", "Log-log slope of median y against x");
  fit_cmd->add_option("--records", records_path, "CSV written by a sweep")->required();
  fit_cmd->add_option("--x", x_field, "n | k | depth_limit");
  fit_cmd->add_option("--y", y_field, "total_queries | max_coherent | circuits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*thr_cmd) emit(hybridq::run_sweep(single_cell(thr, hybridq::Problem::Threshold)), thr.out, thr.format);
    if (*sym_cmd) emit(hybridq::run_sweep(single_cell(sym, hybridq::Problem::Symmetric)), sym.out, sym.format);
    if (*nand_cmd) emit(hybridq::run_sweep(single_cell(nand, hybridq::Problem::Nand)), nand.out, nand.format);
    if (*sweep_cmd) {
      hybridq::SweepConfig cfg = hybridq::load_config(config_path);
      if (!sweep_out.empty()) cfg.out = sweep_out;
      std::string format = sweep_format;
      if (format.empty()) format = cfg.out.size() >= 5 && cfg.out.ends_with(".json") ? "json" : "csv";
      emit(hybridq::run_sweep(cfg), cfg.out, format);
    }
    if (*fit_cmd) {
      const auto records = hybridq::read_records(records_path);
      for (const auto& [x, y] : hybridq::median_by(records, x_field, y_field)) {
        std::printf("%s=%g median_%s=%g\n", x_field.c_str(), x, y_field.c_str(), y);
      }
      const auto fit = hybridq::fit_scaling_exponent(records, x_field, y_field);
      std::printf("slope=%.6f intercept=%.6f r2=%.6f points=%d excluded_fallback=%d\n", fit.slope,
                  fit.intercept, fit.r2, fit.points, fit.excluded_fallback);
    }
  } catch (const hybridq::DepthExceeded& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kInvariantError;
  } catch (const hybridq::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kInvariantError;
  }
  return 0;
}
