#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "batchlearn/simulators.hpp"

namespace batchlearn {

// Everything a run needs. Serialises to flat `key=value` lines; command-line
// flags override values read from a config file.
struct RunConfig {
  std::string command;  // zeta, exact-time, ndelta, simulate, ensemble, extremes, scaling, compare
  std::string dist = "uniform";
  std::size_t n = 0;
  std::vector<std::size_t> n_sweep;
  std::size_t trials = 10000;
  double delta = 0.1;
  double eps = 1e-10;
  double s = 2.0;
  std::vector<double> p;        // exact-time, ndelta
  std::vector<double> fixed_p;  // simulate --fixed-p
  std::string method = "auto";
  std::string alg = "batch";
  std::string policy = "all";
  std::int64_t horizon = kDefaultHorizon;
  std::uint64_t seed = 1;
  std::string out;              // empty: stdout
  std::string format = "json";  // csv | json
  unsigned threads = 1;
  bool dump = false;            // simulate: per-trial CSV
  bool timing = false;          // include wall-clock columns (breaks byte identity)

  // Throws ConfigError describing the first problem found.
  void validate() const;

  std::string to_text() const;
  static RunConfig from_text(std::string_view text);
  static RunConfig load(const std::string& path);

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parses "100,1000,10000"; throws ConfigError.
std::vector<std::size_t> parse_size_list(std::string_view csv);

struct ScalingPoint {
  std::size_t n;
  double value;
  double error;
  double runtime_seconds;

  friend bool operator==(const ScalingPoint&, const ScalingPoint&) = default;
};

struct ScalingReport {
  std::string dist;
  std::string method;  // moment_series | mc_median
  std::vector<ScalingPoint> points;
  double fitted_exponent = 0.0;
  double exponent_ci_low = 0.0;
  double exponent_ci_high = 0.0;
  std::vector<std::size_t> discarded_n;  // pre-asymptotic points left out of the fit
  std::uint64_t seed = 0;
  RunConfig config;

  friend bool operator==(const ScalingReport&, const ScalingReport&) = default;
};

struct ExponentFit {
  double exponent;
  double intercept;
  std::vector<std::size_t> used;  // indices of points in the fit
  std::optional<std::size_t> discarded;
};

// OLS on (log n, log value). The smallest-n point is dropped when its residual
// against the fit of the remaining points exceeds 3x that fit's RMSE (with a
// 1e-3 floor in log space).
ExponentFit fit_power_law(std::span<const double> n, std::span<const double> value);

// T at each n of config.n_sweep: the moment series (alpha > 1) or the Monte
// Carlo median of batch learning times; slope of log T on log n with a
// bootstrap (MC) or leave-one-out (deterministic) interval.
ScalingReport run_scaling(const RunConfig& config);

struct ComparisonRow {
  std::size_t n;
  Algorithm algorithm;
  std::int64_t n_delta;
  double mean_time;  // uncensored trials
  std::size_t censored;
  std::size_t trials;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct ComparisonTable {
  std::string dist;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<ComparisonRow> rows;
  // Orderings that contradict batch <= memoryless (checked when beta >= 0).
  std::vector<std::string> violations;
  RunConfig config;

  friend bool operator==(const ComparisonTable&, const ComparisonTable&) = default;
};

// Empirical N_delta of the three learners over config.n_sweep (or config.n),
// each algorithm on its own stream derived from the master seed.
ComparisonTable compare_algorithms(const RunConfig& config);

enum class OutputFormat { Csv, Json };
OutputFormat parse_output_format(std::string_view name);

// CSV: header `n,value,error` (plus `runtime_seconds` with config.timing),
// one row per point. JSON: schema "batchlearn.scaling/1" with config and seed.
// The embedded config leaves out `threads` and `out`, which never change the
// numbers, so runs differing only in those render identically.
std::string render(const ScalingReport& report, OutputFormat format);
// CSV: header `n,algorithm,n_delta,mean_time,censored,trials`.
// JSON: schema "batchlearn.compare/1".
std::string render(const ComparisonTable& table, OutputFormat format);

ScalingReport parse_scaling_json(std::string_view json);
std::vector<ScalingPoint> parse_scaling_csv(std::string_view csv);
ComparisonTable parse_comparison_json(std::string_view json);

// Writes text to path, or stdout when path is empty. Throws IoError.
void write_output(const std::string& text, const std::string& path);

void emit(const ScalingReport& report, OutputFormat format, const std::string& path);
void emit(const ComparisonTable& table, OutputFormat format, const std::string& path);

// Decimal rendering with 17 significant digits (round-trips exactly).
std::string format_double(double value);

}  // namespace batchlearn
