#include "batchlearn/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <system_error>

#include "batchlearn/distributions.hpp"
#include "batchlearn/ensemble.hpp"
#include "batchlearn/errors.hpp"
#include "batchlearn/numerics.hpp"
#include "json.hpp"

namespace batchlearn {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kBootstrapResamples = 200;
constexpr std::uint64_t kBootstrapStream = 0xb0075742ULL;
constexpr const char* kScalingSchema = "batchlearn.scaling/1";
constexpr const char* kCompareSchema = "batchlearn.compare/1";

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands{"zeta",    "exact-time", "ndelta",
                                                 "simulate", "ensemble",   "extremes",
                                                 "scaling",  "compare"};
  return commands;
}

template <typename T>
T parse_number(std::string_view text, std::string_view key) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("invalid value for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text, std::string_view key) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean for '" + std::string(key) + "': '" + std::string(text) + "'");
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

ordered_json config_json(const RunConfig& config) {
  ordered_json j = ordered_json::object();
  std::istringstream lines(config.to_text());
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    // Execution-only settings do not change results.
    if (key == "threads" || key == "out") continue;
    j[key] = line.substr(eq + 1);
  }
  return j;
}

RunConfig config_from_json(const ordered_json& j) {
  std::string text;
  for (const auto& [key, value] : j.items()) {
    text += key + "=" + value.get<std::string>() + "\n";
  }
  return RunConfig::from_text(text);
}

double median_of(std::vector<double>& v) {
  const std::size_t mid = (v.size() + 1) / 2 - 1;  // lower median
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<std::size_t> parse_size_list(std::string_view csv) {
  std::vector<std::size_t> out;
  if (trim(csv).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = csv.find(',', start);
    const auto field =
        trim(csv.substr(start, comma == std::string_view::npos ? csv.npos : comma - start));
    // Accept 1e5-style entries as long as they are integral.
    const double v = parse_number<double>(field, "n list");
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
      throw ConfigError("n list entries must be nonnegative integers, got '" + std::string(field) +
                        "'");
    }
    out.push_back(static_cast<std::size_t>(v));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string RunConfig::to_text() const {
  std::string t;
  auto put = [&t](std::string_view key, const std::string& value) {
    t.append(key).append("=").append(value).append("\n");
  };
  put("command", command);
  put("dist", dist);
  put("n", std::to_string(n));
  put("n_sweep", join_sizes(n_sweep));
  put("trials", std::to_string(trials));
  put("delta", format_double(delta));
  put("eps", format_double(eps));
  put("s", format_double(s));
  put("p", join_doubles(p));
  put("fixed_p", join_doubles(fixed_p));
  put("method", method);
  put("alg", alg);
  put("policy", policy);
  put("horizon", std::to_string(horizon));
  put("seed", std::to_string(seed));
  put("out", out);
  put("format", format);
  put("threads", std::to_string(threads));
  put("dump", dump ? "true" : "false");
  put("timing", timing ? "true" : "false");
  return t;
}

RunConfig RunConfig::from_text(std::string_view text) {
  RunConfig c;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "command") {
      c.command = value;
    } else if (key == "dist") {
      c.dist = value;
    } else if (key == "n") {
      c.n = parse_number<std::size_t>(value, key);
    } else if (key == "n_sweep") {
      c.n_sweep = parse_size_list(value);
    } else if (key == "trials") {
      c.trials = parse_number<std::size_t>(value, key);
    } else if (key == "delta") {
      c.delta = parse_number<double>(value, key);
    } else if (key == "eps") {
      c.eps = parse_number<double>(value, key);
    } else if (key == "s") {
      c.s = parse_number<double>(value, key);
    } else if (key == "p") {
      c.p = parse_float_list(value);
    } else if (key == "fixed_p") {
      c.fixed_p = parse_float_list(value);
    } else if (key == "method") {
      c.method = value;
    } else if (key == "alg") {
      c.alg = value;
    } else if (key == "policy") {
      c.policy = value;
    } else if (key == "horizon") {
      c.horizon = parse_number<std::int64_t>(value, key);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "out") {
      c.out = value;
    } else if (key == "format") {
      c.format = value;
    } else if (key == "threads") {
      c.threads = parse_number<unsigned>(value, key);
    } else if (key == "dump") {
      c.dump = parse_bool(value, key);
    } else if (key == "timing") {
      c.timing = parse_bool(value, key);
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

void RunConfig::validate() const {
  const auto& commands = known_commands();
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    throw ConfigError("unknown command '" + command + "'");
  }
  try {
    (void)OverlapDistribution::parse(dist);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  parse_output_format(format);
  if (trials == 0) throw ConfigError("trials must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  parse_algorithm(alg);
  parse_repick_policy(policy);

  if (command == "zeta" && !(s > 0.0)) throw ConfigError("zeta needs s > 0");
  if (command == "ensemble") {
    if (n == 0 && n_sweep.empty()) throw ConfigError("ensemble needs --n or --n-sweep");
    if (method != "auto" && method != "alpha1") parse_ensemble_method(method);
  }
  if (command == "extremes" && n_sweep.empty() && n == 0) {
    throw ConfigError("extremes needs --n-sweep");
  }
  if (command == "simulate" && n == 0 && fixed_p.empty()) {
    throw ConfigError("simulate needs --n or --fixed-p");
  }
  if (command == "compare") {
    if (n == 0 && n_sweep.empty()) throw ConfigError("compare needs --n or --n-sweep");
    if (trials < 1000) throw ConfigError("compare needs at least 1000 trials");
  }
  if (command == "scaling") {
    if (method != "auto" && method != "moment_series" && method != "mc_median") {
      throw ConfigError("scaling method must be auto, moment_series or mc_median");
    }
    if (n_sweep.size() < 4) throw ConfigError("scaling needs at least 4 values of n");
    for (std::size_t i = 1; i < n_sweep.size(); ++i) {
      if (n_sweep[i] <= n_sweep[i - 1]) {
        throw ConfigError("scaling n values must be strictly increasing");
      }
    }
    if (n_sweep.front() == 0 ||
        static_cast<double>(n_sweep.back()) < 100.0 * static_cast<double>(n_sweep.front())) {
      throw ConfigError("scaling n values must span at least two decades");
    }
  }
}

ExponentFit fit_power_law(std::span<const double> n, std::span<const double> value) {
  if (n.size() != value.size() || n.size() < 2) {
    throw DomainError("power-law fit needs >= 2 paired points");
  }
  std::vector<double> x(n.size());
  std::vector<double> y(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 0.0 && value[i] > 0.0)) throw DomainError("power-law fit needs positive data");
    x[i] = std::log(n[i]);
    y[i] = std::log(value[i]);
  }
  ExponentFit out{};
  std::size_t first = 0;
  if (n.size() >= 4) {
    const std::size_t lowest = static_cast<std::size_t>(
        std::min_element(x.begin(), x.end()) - x.begin());
    std::vector<double> xr;
    std::vector<double> yr;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i == lowest) continue;
      xr.push_back(x[i]);
      yr.push_back(y[i]);
    }
    const auto rest = fit_line(xr, yr);
    const double residual = y[lowest] - (rest.intercept + rest.slope * x[lowest]);
    if (std::fabs(residual) > std::max(3.0 * rest.rmse, 1e-3)) {
      out.discarded = lowest;
      first = 1;
    }
  }
  (void)first;
  std::vector<double> xu;
  std::vector<double> yu;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (out.discarded && *out.discarded == i) continue;
    out.used.push_back(i);
    xu.push_back(x[i]);
    yu.push_back(y[i]);
  }
  const auto fit = fit_line(xu, yu);
  out.exponent = fit.slope;
  out.intercept = fit.intercept;
  return out;
}

ScalingReport run_scaling(const RunConfig& config) {
  RunConfig c = config;
  c.command = "scaling";
  c.validate();
  const auto dist = OverlapDistribution::parse(c.dist);
  const double alpha = dist.convergence_exponent();
  std::string method = c.method;
  if (method == "auto") method = alpha > 1.0 ? "moment_series" : "mc_median";
  if (method == "moment_series" && !(alpha > 1.0)) {
    throw DivergenceError("moment-series scaling needs alpha > 1; use mc_median");
  }

  ScalingReport report;
  report.dist = dist.spec();
  report.method = method;
  report.seed = c.seed;
  report.config = c;

  const std::size_t m = c.n_sweep.size();
  std::vector<std::vector<double>> samples(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t n = c.n_sweep[i];
    const auto start = std::chrono::steady_clock::now();
    ScalingPoint point{n, 0.0, 0.0, 0.0};
    if (method == "moment_series") {
      const auto est = expected_time_moment_series(dist, n, c.eps);
      point.value = est.value;
      point.error = est.error_bound;
    } else {
      TrialConfig tc;
      tc.algorithm = Algorithm::Batch;
      tc.dist = dist;
      tc.n = n;
      tc.trials = c.trials;
      tc.seed = derive_seed(c.seed, i);
      tc.threads = c.threads;
      const auto batch = run_trials(tc);
      samples[i].assign(batch.times.begin(), batch.times.end());
      std::vector<double> work = samples[i];
      point.value = median_of(work);
    }
    point.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.points.push_back(point);
  }

  std::vector<double> ns(m);
  std::vector<double> values(m);
  for (std::size_t i = 0; i < m; ++i) {
    ns[i] = static_cast<double>(report.points[i].n);
    values[i] = report.points[i].value;
  }
  const auto fit = fit_power_law(ns, values);
  report.fitted_exponent = fit.exponent;
  if (fit.discarded) report.discarded_n.push_back(report.points[*fit.discarded].n);

  auto refit_used = [&](const std::vector<double>& vals, std::optional<std::size_t> skip) {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i : fit.used) {
      if (skip && *skip == i) continue;
      x.push_back(std::log(ns[i]));
      y.push_back(std::log(vals[i]));
    }
    return fit_line(x, y).slope;
  };

  std::vector<double> exponents;
  if (method == "mc_median") {
    std::vector<std::vector<double>> boot_medians(m);
    Rng rng = block_engine(derive_seed(c.seed, kBootstrapStream), 0);
    std::vector<double> resample_vals(m);
    for (std::size_t b = 0; b < kBootstrapResamples; ++b) {
      for (std::size_t i = 0; i < m; ++i) {
        const auto& src = samples[i];
        std::vector<double> draw(src.size());
        for (auto& d : draw) {
          d = src[std::min(src.size() - 1,
                           static_cast<std::size_t>(uniform01(rng) *
                                                    static_cast<double>(src.size())))];
        }
        resample_vals[i] = median_of(draw);
        boot_medians[i].push_back(resample_vals[i]);
      }
      exponents.push_back(refit_used(resample_vals, std::nullopt));
    }
    for (std::size_t i = 0; i < m; ++i) {
      const auto& bm = boot_medians[i];
      double mean = 0.0;
      for (double v : bm) mean += v;
      mean /= static_cast<double>(bm.size());
      double var = 0.0;
      for (double v : bm) var += (v - mean) * (v - mean);
      report.points[i].error = std::sqrt(var / static_cast<double>(bm.size() - 1));
    }
    std::sort(exponents.begin(), exponents.end());
    report.exponent_ci_low = lower_quantile(exponents, 0.025);
    report.exponent_ci_high = lower_quantile(exponents, 0.975);
  } else {
    if (fit.used.size() >= 3) {
      for (std::size_t i : fit.used) exponents.push_back(refit_used(values, i));
    }
    report.exponent_ci_low = report.fitted_exponent;
    report.exponent_ci_high = report.fitted_exponent;
    for (double e : exponents) {
      report.exponent_ci_low = std::min(report.exponent_ci_low, e);
      report.exponent_ci_high = std::max(report.exponent_ci_high, e);
    }
  }
  report.exponent_ci_low = std::min(report.exponent_ci_low, report.fitted_exponent);
  report.exponent_ci_high = std::max(report.exponent_ci_high, report.fitted_exponent);
  return report;
}

ComparisonTable compare_algorithms(const RunConfig& config) {
  RunConfig c = config;
  c.command = "compare";
  c.validate();
  const auto dist = OverlapDistribution::parse(c.dist);
  const auto policy = parse_repick_policy(c.policy);
  const std::vector<std::size_t> ns = c.n_sweep.empty() ? std::vector<std::size_t>{c.n}
                                                        : c.n_sweep;
  ComparisonTable table;
  table.dist = dist.spec();
  table.delta = c.delta;
  table.seed = c.seed;
  table.config = c;

  const bool ordering_expected = dist.has_power_tail() && dist.tail_parameters().beta >= 0.0;
  const Algorithm algorithms[] = {Algorithm::Batch, Algorithm::Memoryless, Algorithm::FullMemory};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const std::uint64_t point_seed = derive_seed(c.seed, i);
    std::int64_t batch_nd = 0;
    for (std::size_t a = 0; a < 3; ++a) {
      TrialConfig tc;
      tc.algorithm = algorithms[a];
      tc.dist = dist;
      tc.n = ns[i];
      tc.trials = c.trials;
      tc.seed = derive_seed(point_seed, a + 1);
      tc.horizon = c.horizon;
      tc.policy = policy;
      tc.threads = c.threads;
      const auto batch = run_trials(tc);
      const std::int64_t nd = empirical_n_delta(batch, c.delta);
      table.rows.push_back({ns[i], algorithms[a], nd, batch.mean(), batch.censored, c.trials});
      if (algorithms[a] == Algorithm::Batch) batch_nd = nd;
      if (algorithms[a] == Algorithm::Memoryless && ordering_expected && batch_nd > nd) {
        table.violations.push_back("n=" + std::to_string(ns[i]) + ": batch N_delta " +
                                   std::to_string(batch_nd) + " > memoryless N_delta " +
                                   std::to_string(nd));
      }
    }
  }
  return table;
}

OutputFormat parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ConfigError("format must be csv or json, got '" + std::string(name) + "'");
}

std::string render(const ScalingReport& report, OutputFormat format) {
  const bool timing = report.config.timing;
  if (format == OutputFormat::Csv) {
    std::string out = timing ? "n,value,error,runtime_seconds\n" : "n,value,error\n";
    for (const auto& p : report.points) {
      out += std::to_string(p.n) + "," + format_double(p.value) + "," + format_double(p.error);
      if (timing) out += "," + format_double(p.runtime_seconds);
      out += "\n";
    }
    return out;
  }
  ordered_json j;
  j["schema"] = kScalingSchema;
  j["dist"] = report.dist;
  j["method"] = report.method;
  j["seed"] = report.seed;
  j["fitted_exponent"] = report.fitted_exponent;
  j["exponent_ci"] = {report.exponent_ci_low, report.exponent_ci_high};
  j["discarded_n"] = report.discarded_n;
  j["points"] = ordered_json::array();
  for (const auto& p : report.points) {
    ordered_json row{{"n", p.n}, {"value", p.value}, {"error", p.error}};
    if (timing) row["runtime_seconds"] = p.runtime_seconds;
    j["points"].push_back(row);
  }
  j["config"] = config_json(report.config);
  return j.dump(2) + "\n";
}

std::string render(const ComparisonTable& table, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    std::string out = "n,algorithm,n_delta,mean_time,censored,trials\n";
    for (const auto& r : table.rows) {
      out += std::to_string(r.n) + "," + std::string(to_string(r.algorithm)) + "," +
             std::to_string(r.n_delta) + "," + format_double(r.mean_time) + "," +
             std::to_string(r.censored) + "," + std::to_string(r.trials) + "\n";
    }
    return out;
  }
  ordered_json j;
  j["schema"] = kCompareSchema;
  j["dist"] = table.dist;
  j["delta"] = table.delta;
  j["seed"] = table.seed;
  j["rows"] = ordered_json::array();
  for (const auto& r : table.rows) {
    j["rows"].push_back({{"n", r.n},
                         {"algorithm", to_string(r.algorithm)},
                         {"n_delta", r.n_delta},
                         {"mean_time", r.mean_time},
                         {"censored", r.censored},
                         {"trials", r.trials}});
  }
  j["violations"] = table.violations;
  j["config"] = config_json(table.config);
  return j.dump(2) + "\n";
}

ScalingReport parse_scaling_json(std::string_view text) {
  const auto j = ordered_json::parse(text);
  if (j.at("schema") != kScalingSchema) throw ConfigError("unsupported scaling schema");
  ScalingReport r;
  r.dist = j.at("dist").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.fitted_exponent = j.at("fitted_exponent").get<double>();
  r.exponent_ci_low = j.at("exponent_ci").at(0).get<double>();
  r.exponent_ci_high = j.at("exponent_ci").at(1).get<double>();
  r.discarded_n = j.at("discarded_n").get<std::vector<std::size_t>>();
  for (const auto& p : j.at("points")) {
    r.points.push_back({p.at("n").get<std::size_t>(), p.at("value").get<double>(),
                        p.at("error").get<double>(), p.value("runtime_seconds", 0.0)});
  }
  r.config = config_from_json(j.at("config"));
  return r;
}

std::vector<ScalingPoint> parse_scaling_csv(std::string_view csv) {
  std::vector<ScalingPoint> points;
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line)) return points;
  const bool timing = line.find("runtime_seconds") != std::string::npos;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != (timing ? 4u : 3u)) throw ConfigError("malformed scaling CSV row");
    points.push_back({parse_number<std::size_t>(fields[0], "n"),
                      parse_number<double>(fields[1], "value"),
                      parse_number<double>(fields[2], "error"),
                      timing ? parse_number<double>(fields[3], "runtime_seconds") : 0.0});
  }
  return points;
}

ComparisonTable parse_comparison_json(std::string_view text) {
  const auto j = ordered_json::parse(text);
  if (j.at("schema") != kCompareSchema) throw ConfigError("unsupported comparison schema");
  ComparisonTable t;
  t.dist = j.at("dist").get<std::string>();
  t.delta = j.at("delta").get<double>();
  t.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& r : j.at("rows")) {
    t.rows.push_back({r.at("n").get<std::size_t>(),
                      parse_algorithm(r.at("algorithm").get<std::string>()),
                      r.at("n_delta").get<std::int64_t>(), r.at("mean_time").get<double>(),
                      r.at("censored").get<std::size_t>(), r.at("trials").get<std::size_t>()});
  }
  t.violations = j.at("violations").get<std::vector<std::string>>();
  t.config = config_from_json(j.at("config"));
  return t;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

void emit(const ScalingReport& report, OutputFormat format, const std::string& path) {
  write_output(render(report, format), path);
}

void emit(const ComparisonTable& table, OutputFormat format, const std::string& path) {
  write_output(render(table, format), path);
}

}  // namespace batchlearn
