// batchlab: command-line front end for the batchlearn library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <functional>
#include <map>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "batchlearn/batch_exact.hpp"
#include "batchlearn/distributions.hpp"
#include "batchlearn/ensemble.hpp"
#include "batchlearn/errors.hpp"
#include "batchlearn/harness.hpp"
#include "batchlearn/moment_zeta.hpp"
#include "batchlearn/simulators.hpp"

namespace {

using batchlearn::RunConfig;
using json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kIoFailure = 1,
  kConfigFailure = 2,
  kDivergence = 3,
  kPrecision = 4,
};

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return batchlearn::format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Flat records -> CSV with the keys of the first record as header.
std::string records_to_csv(const json& records, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& r : records) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      out += (i ? "," : "") + csv_cell(r.contains(header[i]) ? r[header[i]] : json());
    }
    out += "\n";
  }
  return out;
}

std::vector<std::string> keys_of(const json& record) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : record.items()) keys.push_back(k);
  return keys;
}

json recorded_config(const RunConfig& config) {
  // Same view of the config the harness embeds in its reports.
  const auto text = config.to_text();
  json j = json::object();
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    const auto eq = line.find('=');
    const auto key = line.substr(0, eq);
    if (key == "threads" || key == "out") continue;
    j[key] = line.substr(eq + 1);
  }
  return j;
}

void emit_document(const RunConfig& config, const std::string& schema, const json& records,
                   const json& extra = json::object()) {
  const auto format = batchlearn::parse_output_format(config.format);
  if (format == batchlearn::OutputFormat::Csv) {
    const auto header = records.empty() ? std::vector<std::string>{} : keys_of(records.front());
    batchlearn::write_output(records_to_csv(records, header), config.out);
    return;
  }
  json doc;
  doc["schema"] = schema;
  doc["seed"] = config.seed;
  for (const auto& [k, v] : extra.items()) doc[k] = v;
  doc["records"] = records;
  doc["config"] = recorded_config(config);
  batchlearn::write_output(doc.dump(2) + "\n", config.out);
}

batchlearn::OverlapDistribution parse_dist(const RunConfig& config) {
  try {
    return batchlearn::OverlapDistribution::parse(config.dist);
  } catch (const batchlearn::DomainError& e) {
    throw batchlearn::ConfigError(e.what());
  }
}

int cmd_zeta(const RunConfig& config) {
  const auto dist = parse_dist(config);
  const auto z = batchlearn::zeta(dist, config.s, config.eps);
  json r{{"dist", dist.spec()},
         {"s", config.s},
         {"value", z.value},
         {"error_bound", z.error_bound},
         {"terms", z.terms}};
  if (config.n > 0) {
    const auto check =
        batchlearn::verify_zeta_expectation(dist, config.n, config.trials, config.seed,
                                            config.threads);
    r["n"] = config.n;
    r["trials"] = check.trials;
    r["mc_estimate"] = check.mc_estimate;
    r["stderr_mean"] = check.stderr_mean;
    r["z_score"] = check.z_score;
    r["finite_variance"] = check.finite_variance;
    r["winsorized_mean"] = check.winsorized_mean;
  }
  emit_document(config, "batchlearn.zeta/1", json::array({r}));
  return kOk;
}

int cmd_exact_time(const RunConfig& config) {
  const auto& p = config.p;
  const auto t = batchlearn::expected_time_series(p, config.eps);
  json r{{"n", p.size()},
         {"T", t.T},
         {"steps_expectation", t.steps_expectation},
         {"error_bound", t.error_bound}};
  r["T_subsets"] = p.size() <= batchlearn::kMaxSubsetOverlaps
                       ? json(batchlearn::expected_time_subsets(p))
                       : json();
  if (!p.empty()) {
    const auto b = batchlearn::coarse_bounds(p);
    r["steps_lower"] = b.lower;
    r["steps_upper"] = b.upper;
  }
  emit_document(config, "batchlearn.exact_time/1", json::array({r}));
  return kOk;
}

int cmd_ndelta(const RunConfig& config) {
  json r;
  if (!config.p.empty()) {
    r = {{"n", config.p.size()},
         {"delta", config.delta},
         {"n_delta", batchlearn::n_delta(config.p, config.delta)},
         {"source", "exact"}};
  } else {
    if (config.n == 0) throw batchlearn::ConfigError("ndelta needs --p or --n with --dist");
    const auto dist = parse_dist(config);
    const auto alg = batchlearn::parse_algorithm(config.alg);
    const auto nd = batchlearn::empirical_n_delta(
        alg, dist, config.n, config.delta, config.trials, config.seed, config.threads,
        config.horizon, batchlearn::parse_repick_policy(config.policy));
    r = {{"n", config.n},
         {"delta", config.delta},
         {"n_delta", nd},
         {"source", "empirical"},
         {"dist", dist.spec()},
         {"alg", batchlearn::to_string(alg)},
         {"trials", config.trials}};
  }
  emit_document(config, "batchlearn.ndelta/1", json::array({r}));
  return kOk;
}

int cmd_simulate(const RunConfig& config) {
  batchlearn::TrialConfig tc;
  tc.algorithm = batchlearn::parse_algorithm(config.alg);
  tc.dist = parse_dist(config);
  tc.n = config.fixed_p.empty() ? config.n : config.fixed_p.size();
  tc.trials = config.trials;
  tc.seed = config.seed;
  if (!config.fixed_p.empty()) tc.fixed_p = config.fixed_p;
  tc.horizon = config.horizon;
  tc.policy = batchlearn::parse_repick_policy(config.policy);
  tc.threads = config.threads;
  const auto batch = batchlearn::run_trials(tc);

  if (config.dump) {
    std::string out = "trial,time,censored\n";
    for (std::size_t i = 0; i < batch.times.size(); ++i) {
      const bool censored = batch.times[i] == batchlearn::kCensored;
      out += std::to_string(i) + "," + (censored ? "" : std::to_string(batch.times[i])) + "," +
             (censored ? "1" : "0") + "\n";
    }
    batchlearn::write_output(out, config.out);
    return kOk;
  }
  const auto quantile = batch.quantile_time(config.delta);
  json r{{"alg", batchlearn::to_string(tc.algorithm)},
         {"dist", batch.dist},
         {"n", tc.n},
         {"trials", config.trials},
         {"fixed_p", !config.fixed_p.empty()},
         {"mean", batch.mean()},
         {"stderr_mean", batch.stderr_mean()},
         {"censored", batch.censored},
         {"delta", config.delta},
         {"n_delta", quantile == batchlearn::kCensored ? json() : json(quantile)}};
  emit_document(config, "batchlearn.simulate/1", json::array({r}));
  return kOk;
}

int cmd_ensemble(const RunConfig& config) {
  const auto dist = parse_dist(config);
  const double alpha = dist.convergence_exponent();
  std::string method = config.method;
  if (method == "auto") {
    method = alpha > 1.0 ? "moment_series" : (alpha == 1.0 ? "alpha1" : "monte_carlo");
  }
  const std::vector<std::size_t> ns =
      config.n_sweep.empty() ? std::vector<std::size_t>{config.n} : config.n_sweep;
  json records = json::array();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    json r;
    if (method == "alpha1") {
      const auto d = batchlearn::alpha1_decomposition(dist, ns[i], config.eps);
      r = {{"n", d.n},
           {"method", "alpha1"},
           {"T2", d.T2},
           {"T2_error", d.T2_error},
           {"c", d.c},
           {"c_log_term", d.c_log_term},
           {"T2_over_nlogn", d.T2_over_nlogn}};
    } else {
      const auto m = batchlearn::parse_ensemble_method(method);
      batchlearn::EnsembleEstimate e{};
      switch (m) {
        case batchlearn::EnsembleMethod::ZetaSum:
          e = batchlearn::expected_time_zeta_sum(dist, ns[i]);
          break;
        case batchlearn::EnsembleMethod::MomentSeries:
          e = batchlearn::expected_time_moment_series(dist, ns[i], config.eps);
          break;
        case batchlearn::EnsembleMethod::IntegralAsymptotic:
          e = batchlearn::expected_time_integral(dist, ns[i]);
          break;
        case batchlearn::EnsembleMethod::MonteCarlo:
          e = batchlearn::expected_time_monte_carlo(dist, ns[i], config.trials,
                                                    batchlearn::derive_seed(config.seed, i),
                                                    config.threads);
          break;
      }
      r = {{"n", e.n},
           {"method", batchlearn::to_string(e.method)},
           {"statistic", e.statistic},
           {"value", e.value},
           {"error_bound", e.error_applicable ? json(e.error_bound) : json()},
           {"condition", e.condition}};
    }
    if (config.timing) {
      r["runtime_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    records.push_back(r);
  }
  emit_document(config, "batchlearn.ensemble/1", records, json{{"dist", dist.spec()}});
  return kOk;
}

int cmd_extremes(const RunConfig& config) {
  const auto dist = parse_dist(config);
  const std::vector<std::size_t> ns =
      config.n_sweep.empty() ? std::vector<std::size_t>{config.n} : config.n_sweep;
  json records = json::array();
  json extra{{"dist", dist.spec()}};
  auto row = [](const batchlearn::ExtremeValue& e) {
    return json{{"n", e.n},
                {"trials", e.trials},
                {"mean_min_gap", e.mean_min_gap},
                {"stderr_mean", e.stderr_mean},
                {"fitted_C", e.fitted_C},
                {"ks_distance", e.ks_distance}};
  };
  if (ns.size() >= 2) {
    const auto sweep =
        batchlearn::extreme_value_sweep(dist, ns, config.trials, config.seed, config.threads);
    for (const auto& e : sweep.points) records.push_back(row(e));
    extra["slope"] = sweep.slope;
    extra["expected_slope"] = sweep.expected_slope;
    extra["fitted_C"] = sweep.fitted_C;
    extra["C_limit_law"] = sweep.C_limit_law;
    extra["C_alternative"] = sweep.C_alternative;
    extra["matching_form"] = sweep.matching_form;
  } else {
    records.push_back(row(
        batchlearn::extreme_value(dist, ns.front(), config.trials, config.seed, config.threads)));
  }
  emit_document(config, "batchlearn.extremes/1", records, extra);
  return kOk;
}

int cmd_scaling(const RunConfig& config) {
  const auto report = batchlearn::run_scaling(config);
  batchlearn::emit(report, batchlearn::parse_output_format(config.format), config.out);
  if (!report.discarded_n.empty()) {
    std::cerr << "note: n = " << report.discarded_n.front()
              << " left out of the fit as pre-asymptotic\n";
  }
  return kOk;
}

int cmd_compare(const RunConfig& config) {
  const auto table = batchlearn::compare_algorithms(config);
  batchlearn::emit(table, batchlearn::parse_output_format(config.format), config.out);
  for (const auto& v : table.violations) std::cerr << "ordering violation: " << v << "\n";
  return kOk;
}

std::optional<std::string> find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return std::string(argv[i + 1]);
    if (std::strncmp(argv[i], "--config=", 9) == 0) return std::string(argv[i] + 9);
  }
  return std::nullopt;
}

int run(int argc, char** argv) {
  RunConfig config;
  if (const auto path = find_config_path(argc, argv)) config = RunConfig::load(*path);

  CLI::App app{"Batch learning-time calculator and simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string save_config;
  app.add_option("--config", config_path, "flat key=value config file; flags override it");
  app.add_option("--save-config", save_config, "write the effective config to this path");
  app.add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& v) { config.seed = v; }, "master seed");
  app.add_option_function<std::string>(
      "--out", [&](const std::string& v) { config.out = v; }, "output path (default stdout)");
  app.add_option_function<std::string>(
      "--format", [&](const std::string& v) { config.format = v; }, "csv or json");
  app.add_option_function<unsigned>(
      "--threads", [&](const unsigned& v) { config.threads = v; }, "worker threads (0: all)");
  app.add_flag_function(
      "--timing", [&](std::int64_t) { config.timing = true; }, "add wall-clock columns");

  auto dist = [&](CLI::App* c) {
    c->add_option_function<std::string>(
        "--dist", [&](const std::string& v) { config.dist = v; },
        "uniform | powertail:beta=<b> | scaled:a=<a>,inner=<spec>");
  };
  auto n = [&](CLI::App* c) {
    c->add_option_function<std::size_t>(
        "--n", [&](const std::size_t& v) { config.n = v; }, "number of overlapping concepts");
  };
  auto n_sweep = [&](CLI::App* c) {
    c->add_option_function<std::string>(
        "--n-sweep", [&](const std::string& v) { config.n_sweep = batchlearn::parse_size_list(v); },
        "comma-separated n values");
  };
  auto trials = [&](CLI::App* c) {
    c->add_option_function<std::size_t>(
        "--trials", [&](const std::size_t& v) { config.trials = v; }, "Monte Carlo trials");
  };
  auto delta = [&](CLI::App* c) {
    c->add_option_function<double>(
        "--delta", [&](const double& v) { config.delta = v; }, "failure probability");
  };
  auto eps = [&](CLI::App* c) {
    c->add_option_function<double>(
        "--eps", [&](const double& v) { config.eps = v; }, "absolute tolerance");
  };
  auto p = [&](CLI::App* c) {
    c->add_option_function<std::string>(
        "--p", [&](const std::string& v) { config.p = batchlearn::parse_float_list(v); },
        "comma-separated overlap probabilities");
  };
  auto method = [&](CLI::App* c, const std::string& help) {
    c->add_option_function<std::string>(
        "--method", [&](const std::string& v) { config.method = v; }, help);
  };
  auto alg = [&](CLI::App* c) {
    c->add_option_function<std::string>(
        "--alg", [&](const std::string& v) { config.alg = v; }, "batch | memoryless | full_memory");
  };
  auto sim = [&](CLI::App* c) {
    c->add_option_function<std::int64_t>(
        "--horizon", [&](const std::int64_t& v) { config.horizon = v; }, "censoring horizon");
    c->add_option_function<std::string>(
        "--policy", [&](const std::string& v) { config.policy = v; },
        "memoryless re-pick policy: all | exclude_rejected");
  };

  std::map<std::string, std::function<int(const RunConfig&)>> handlers{
      {"zeta", cmd_zeta},         {"exact-time", cmd_exact_time}, {"ndelta", cmd_ndelta},
      {"simulate", cmd_simulate}, {"ensemble", cmd_ensemble},     {"extremes", cmd_extremes},
      {"scaling", cmd_scaling},   {"compare", cmd_compare}};

  auto* zeta = app.add_subcommand("zeta", "moment zeta function; with --n, the MC check");
  dist(zeta);
  n(zeta);
  trials(zeta);
  eps(zeta);
  zeta->add_option_function<double>("--s", [&](const double& v) { config.s = v; }, "argument");

  auto* exact = app.add_subcommand("exact-time", "expected learning time for fixed p");
  p(exact);
  eps(exact);

  auto* nd = app.add_subcommand("ndelta", "N_delta: exact for --p, empirical for --dist/--n");
  p(nd);
  delta(nd);
  dist(nd);
  n(nd);
  trials(nd);
  alg(nd);
  sim(nd);

  auto* simulate = app.add_subcommand("simulate", "run learner trials");
  alg(simulate);
  dist(simulate);
  n(simulate);
  trials(simulate);
  delta(simulate);
  sim(simulate);
  simulate->add_option_function<std::string>(
      "--fixed-p", [&](const std::string& v) { config.fixed_p = batchlearn::parse_float_list(v); },
      "use this overlap vector in every trial");
  simulate->add_flag_function(
      "--dump", [&](std::int64_t) { config.dump = true; }, "write per-trial times as CSV");

  auto* ensemble = app.add_subcommand("ensemble", "expected time over random overlap vectors");
  dist(ensemble);
  n(ensemble);
  n_sweep(ensemble);
  trials(ensemble);
  eps(ensemble);
  method(ensemble,
         "auto | zeta_sum | moment_series | integral_asymptotic | monte_carlo | alpha1");

  auto* extremes = app.add_subcommand("extremes", "smallest gap statistics");
  dist(extremes);
  n(extremes);
  n_sweep(extremes);
  trials(extremes);

  auto* scaling = app.add_subcommand("scaling", "log-log exponent of T over an n sweep");
  dist(scaling);
  n_sweep(scaling);
  trials(scaling);
  eps(scaling);
  method(scaling, "auto | moment_series | mc_median");

  auto* compare = app.add_subcommand("compare", "N_delta of batch, memoryless and full memory");
  dist(compare);
  n(compare);
  n_sweep(compare);
  trials(compare);
  delta(compare);
  sim(compare);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  config.command = app.get_subcommands().front()->get_name();
  config.validate();
  if (!save_config.empty()) batchlearn::write_output(config.to_text(), save_config);
  return handlers.at(config.command)(config);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const batchlearn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const batchlearn::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const batchlearn::PrecisionError& e) {
    std::cerr << "precision: " << e.what() << "\n";
    return kPrecision;
  } catch (const batchlearn::CensoringError& e) {
    std::cerr << "censoring: " << e.what() << "\n";
    return kPrecision;
  } catch (const batchlearn::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::length_error& e) {
    std::cerr << "too large: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoFailure;
  }
}
