#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hybridq {

enum class Problem { Threshold, Symmetric, Nand };
enum class Strategy { Interpolate, Parallel };

std::string to_string(Problem p);
std::string to_string(Strategy s);
Problem parse_problem(const std::string& text);
Strategy parse_strategy(const std::string& text);

struct SweepConfig {
  Problem problem = Problem::Threshold;
  std::vector<int> sizes;                  // N; for NAND the leaf count 2^d
  std::vector<int> ks{0};                  // threshold only
  std::vector<std::int64_t> depths;
  std::vector<Strategy> strategies{Strategy::Interpolate};
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::int64_t cost_multiplier = 1;
  double alpha = 1.0;                      // symmetric only
  std::string function = "majority";       // symmetric: parity | majority
  std::vector<std::uint8_t> table;         // symmetric: explicit f(0..N), overrides function
  double subtree_size_factor = 1.0;        // NAND parallel c_p
  // Input drawn per trial: "boundary" puts weight k or k + 1 (threshold only),
  // "uniform" draws independent fair bits. Empty picks boundary for threshold
  // sweeps and uniform otherwise.
  std::string inputs;

  void validate() const;  // InvalidInput on empty lists or bad values
  static SweepConfig from_json(const std::string& text);
};

SweepConfig load_config(const std::string& path);

struct ExperimentRecord {
  Problem problem = Problem::Threshold;
  int n = 0;
  int k = 0;  // threshold k, symmetric Γ(f), NAND depth d
  std::int64_t depth_limit = 0;
  Strategy strategy = Strategy::Interpolate;
  int trial = 0;
  int answer = 0;
  int truth = 0;
  bool correct = false;
  std::int64_t total_queries = 0;
  std::int64_t max_coherent = 0;
  std::int64_t circuits = 0;
  std::uint64_t seed = 0;
  bool fallback = false;
  int cell = 0;  // not serialized

  bool operator==(const ExperimentRecord&) const = default;
};

// One record per (cell, trial), sorted by (cell, trial). Cells enumerate
// sizes × ks × depths × strategies in that nesting order. A solver exceeding
// the depth limit is a bug: DepthExceeded propagates, and a record with
// max_coherent > D raises std::logic_error.
std::vector<ExperimentRecord> run_sweep(const SweepConfig& config);

inline constexpr const char* kCsvHeader =
    "problem,n,k,depth_limit,strategy,trial,answer,truth,correct,total_queries,max_coherent,"
    "circuits,seed,fallback";

void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);
void write_json(std::ostream& os, const std::vector<ExperimentRecord>& records);
// Writes csv or json by `format`; IoError when the path cannot be opened.
void write_records(const std::string& path, const std::string& format,
                   const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_csv(std::istream& is);
std::vector<ExperimentRecord> read_records(const std::string& path);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
  int excluded_fallback = 0;
};

// OLS of log(median y) on log x over non-fallback records. Fields: n, k,
// depth_limit, total_queries, max_coherent, circuits. InsufficientData below
// three distinct x values.
ScalingFit fit_scaling_exponent(const std::vector<ExperimentRecord>& records,
                                const std::string& x_field, const std::string& y_field);

// Median of y per distinct x over non-fallback records, sorted by x.
std::vector<std::pair<double, double>> median_by(const std::vector<ExperimentRecord>& records,
                                                 const std::string& x_field,
                                                 const std::string& y_field);

// l (1 + 2k)² / (π (1 - π)) for l samples of a k-step Grover experiment with
// success probability π. Singular at π ∈ {0, 1}.
double fisher_information(double pi, double grover_steps, double samples);

}  // namespace hybridq
