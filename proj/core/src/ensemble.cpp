#include "batchlearn/ensemble.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "batchlearn/batch_exact.hpp"
#include "batchlearn/errors.hpp"
#include "batchlearn/moment_zeta.hpp"
#include "batchlearn/numerics.hpp"

namespace batchlearn {
namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();
constexpr std::size_t kMaxZetaSumN = 30;
constexpr double kMaxCancellationUlps = 1e6;
constexpr std::int64_t kMaxSeriesTerms = std::int64_t{1} << 30;

double require_alpha_above_one(const OverlapDistribution& dist, std::string_view what) {
  const double alpha = dist.convergence_exponent();
  if (!(alpha > 1.0)) {
    throw DivergenceError(std::string(what) + " needs alpha > 1, got alpha = " +
                          std::to_string(alpha) +
                          "; E[T] does not exist (use the alpha = 1 decomposition)");
  }
  return alpha;
}

// 1 - (1 - m)^n, accurate for small m.
double learned_gap(double m, double n) { return -std::expm1(n * std::log1p(-m)); }

// (1 - m)^n - 1 + n m >= 0 without cancellation for small n m.
double second_order_excess(double m, double n) {
  if (n * m < 1e-2) {
    double term = 0.5 * n * (n - 1.0) * m * m;
    double sum = 0.0;
    for (double r = 2.0; r <= n && term != 0.0; r += 1.0) {
      sum += term;
      if (std::fabs(term) <= 1e-17 * std::fabs(sum)) break;
      term *= -m * (n - r) / (r + 1.0);
    }
    return sum;
  }
  return std::expm1(n * std::log1p(-m)) + n * m;
}

// Smallest j >= 1 with n * m_j <= 1.
double first_small_index(const OverlapDistribution& dist, double n) {
  double hi = 1.0;
  while (n * dist.moment_at(hi) > 1.0) hi *= 2.0;
  if (hi == 1.0) return 1.0;
  double lo = hi / 2.0;
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (n * dist.moment_at(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::vector<double> sorted_copy(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

double power_scale(double n, double alpha) { return std::pow(n, 1.0 / alpha); }

}  // namespace

std::string_view to_string(EnsembleMethod method) noexcept {
  switch (method) {
    case EnsembleMethod::ZetaSum:
      return "zeta_sum";
    case EnsembleMethod::MomentSeries:
      return "moment_series";
    case EnsembleMethod::IntegralAsymptotic:
      return "integral_asymptotic";
    case EnsembleMethod::MonteCarlo:
      return "monte_carlo";
  }
  return "";
}

EnsembleMethod parse_ensemble_method(std::string_view name) {
  for (auto m : {EnsembleMethod::ZetaSum, EnsembleMethod::MomentSeries,
                 EnsembleMethod::IntegralAsymptotic, EnsembleMethod::MonteCarlo}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown ensemble method '" + std::string(name) +
                    "' (zeta_sum, moment_series, integral_asymptotic, monte_carlo)");
}

EnsembleEstimate expected_time_zeta_sum(const OverlapDistribution& dist, std::size_t n) {
  require_alpha_above_one(dist, "zeta-sum expected time");
  if (n == 0) return {0, EnsembleMethod::ZetaSum, 0.0, 0.0, true, "mean", 1.0};
  if (n > kMaxZetaSumN) {
    throw PrecisionError("alternating zeta sum limited to n <= 30 in double precision");
  }
  CompensatedSum sum;
  double error = 0.0;
  double binom = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
    const auto z = zeta(dist, static_cast<double>(k), 1e-13);
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    sum += sign * binom * z.value;
    error += binom * z.error_bound;
  }
  const double value = sum.value();
  const double condition = sum.abs_total() / std::fabs(value);
  if (condition > kMaxCancellationUlps) {
    throw PrecisionError("alternating zeta sum loses " + std::to_string(condition) +
                         " ulps to cancellation at n = " + std::to_string(n));
  }
  error += 4.0 * kUlp * sum.abs_total();
  return {n, EnsembleMethod::ZetaSum, value, error, true, "mean", condition};
}

EnsembleEstimate expected_time_moment_series(const OverlapDistribution& dist, std::size_t n,
                                             double eps) {
  require_alpha_above_one(dist, "moment-series expected time");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (n == 0) return {0, EnsembleMethod::MomentSeries, 0.0, 0.0, true, "mean", 1.0};
  const double nn = static_cast<double>(n);

  MomentSequence moments(dist);
  auto h = [&dist, nn](double x) { return learned_gap(dist.moment_at(x), nn); };

  // h is convex once n m(x) <= 1, which the tail bracket needs.
  auto last = static_cast<std::int64_t>(std::max(64.0, first_small_index(dist, nn)));
  CompensatedSum head;
  std::int64_t summed = 0;
  for (;;) {
    for (std::int64_t j = summed + 1; j <= last; ++j) {
      head += learned_gap(moments(static_cast<std::size_t>(j)), nn);
    }
    summed = last;
    const auto tail = convex_tail_sum(h, static_cast<double>(last));
    const double rounding = 4.0 * kUlp * (head.abs_total() + tail.estimate);
    if (tail.error + rounding <= eps || last >= kMaxSeriesTerms) {
      if (tail.error + rounding > eps) {
        throw PrecisionError("moment series could not reach eps = " + std::to_string(eps));
      }
      return {n,    EnsembleMethod::MomentSeries, head.value() + tail.estimate,
              tail.error + rounding, true, "mean", 1.0};
    }
    last *= 2;
  }
}

double limit_integral(const OverlapDistribution& dist) {
  const auto tp = dist.tail_parameters();
  if (!(tp.alpha > 1.0)) {
    throw DivergenceError("limit integral diverges for alpha <= 1");
  }
  const double c = tp.moment_constant;
  const double a = tp.alpha;
  // [0, 1] directly; [1, inf) through u = 1/t.
  const auto inner = integrate_endpoint_singular(
      [c, a](double u) { return -std::expm1(-c * std::pow(u, a)) / (u * u); }, 0.0, 1.0);
  const auto outer = integrate_endpoint_singular(
      [c, a](double t) { return -std::expm1(-c * std::pow(t, -a)); }, 0.0, 1.0);
  return inner.value + outer.value;
}

EnsembleEstimate expected_time_integral(const OverlapDistribution& dist, std::size_t n) {
  const double alpha = require_alpha_above_one(dist, "integral asymptotic");
  const double value = power_scale(static_cast<double>(n), alpha) * limit_integral(dist);
  return {n, EnsembleMethod::IntegralAsymptotic, value, 0.0, false, "mean", 1.0};
}

EnsembleEstimate expected_time_monte_carlo(const OverlapDistribution& dist, std::size_t n,
                                           std::size_t trials, std::uint64_t seed,
                                           unsigned threads) {
  if (trials < 2) throw DomainError("Monte Carlo needs at least two trials");
  std::vector<double> values(trials);
  const double eps = 1e-9 * std::max<double>(1.0, static_cast<double>(n));
  for_each_trial_block(seed, trials, threads, [&](Rng& rng, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      values[t] = expected_time_series(sample(dist, n, rng), eps).T;
    }
  });

  EnsembleEstimate est;
  est.n = n;
  est.method = EnsembleMethod::MonteCarlo;
  if (dist.convergence_exponent() > 1.0) {
    CompensatedSum sum;
    for (double v : values) sum += v;
    const double mean = sum.value() / static_cast<double>(trials);
    CompensatedSum sq;
    for (double v : values) sq += (v - mean) * (v - mean);
    est.value = mean;
    est.error_bound = std::sqrt(sq.value() / static_cast<double>(trials - 1) /
                                static_cast<double>(trials));
  } else {
    const auto sorted = sorted_copy(values);
    est.value = lower_quantile(sorted, 0.5);
    est.error_applicable = false;
    est.statistic = "median";
  }
  return est;
}

double richardson_moment_constant(const OverlapDistribution& dist, double alpha) {
  auto g = [&](double j) { return std::pow(j, alpha) * dist.moment_at(j); };
  // g(j) = c + a/j + b/j^2 + ...
  const double g1 = g(1000.0);
  const double g2 = g(2000.0);
  const double g4 = g(4000.0);
  const double r1 = 2.0 * g2 - g1;
  const double r2 = 2.0 * g4 - g2;
  return (4.0 * r2 - r1) / 3.0;
}

Alpha1Decomposition alpha1_decomposition(const OverlapDistribution& dist, std::size_t n,
                                         double eps) {
  const double alpha = dist.convergence_exponent();
  if (!(std::fabs(alpha - 1.0) < 1e-12)) {
    throw DomainError("alpha = 1 decomposition applies only to alpha = 1 (got " +
                      std::to_string(alpha) + ")");
  }
  if (n < 2) throw DomainError("alpha = 1 decomposition needs n >= 2");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double nn = static_cast<double>(n);

  MomentSequence moments(dist);
  auto h = [&dist, nn](double x) { return second_order_excess(dist.moment_at(x), nn); };

  std::int64_t last = 64;
  std::int64_t summed = 0;
  CompensatedSum head;
  for (;;) {
    for (std::int64_t j = summed + 1; j <= last; ++j) {
      head += second_order_excess(moments(static_cast<std::size_t>(j)), nn);
    }
    summed = last;
    const auto tail = convex_tail_sum(h, static_cast<double>(last));
    const double error = tail.error + 4.0 * kUlp * (head.abs_total() + tail.estimate);
    if (error <= eps || last >= kMaxSeriesTerms) {
      if (error > eps) throw PrecisionError("T2 series could not reach eps");
      const double T2 = -(head.value() + tail.estimate);
      const double c = richardson_moment_constant(dist, 1.0);
      const double nlogn = nn * std::log(nn);
      return {n, T2, error, c, c * nlogn, T2 / nlogn, last};
    }
    last *= 2;
  }
}

LawOfLargeNumbers alpha1_law_of_large_numbers(const OverlapDistribution& dist, std::size_t n,
                                              std::size_t trials, std::uint64_t seed,
                                              unsigned threads) {
  if (n == 0 || trials == 0) throw DomainError("law of large numbers check needs n, trials > 0");
  std::vector<double> ratios(trials);
  const double nn = static_cast<double>(n);
  for_each_trial_block(seed, trials, threads, [&](Rng& rng, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      ratios[t] = expected_time_series(sample(dist, n, rng), 1e-9 * nn).T / nn;
    }
  });
  const auto sorted = sorted_copy(std::move(ratios));
  const std::size_t cut = trials / 100;
  CompensatedSum central;
  for (std::size_t i = cut; i < trials - cut; ++i) central += sorted[i];
  return {n,
          trials,
          lower_quantile(sorted, 0.5),
          lower_quantile(sorted, 0.25),
          lower_quantile(sorted, 0.75),
          central.value() / static_cast<double>(trials - 2 * cut)};
}

Concentration sum_inverse_gap_concentration(const OverlapDistribution& dist, std::size_t n,
                                            std::size_t trials, std::uint64_t seed,
                                            unsigned threads) {
  if (n < 2 || trials < 1000) {
    throw DomainError("concentration check needs n >= 2 and at least 1000 trials");
  }
  const auto tp = dist.tail_parameters();
  const double nn = static_cast<double>(n);
  Concentration out;
  if (tp.beta > 0.0) {
    out.normalization = "n";
    out.scale = nn;
  } else if (tp.beta == 0.0) {
    out.normalization = "n log n";
    out.scale = nn * std::log(nn);
  } else {
    out.normalization = "n^(1/alpha)";
    out.scale = power_scale(nn, tp.alpha);
  }

  std::vector<double> values(trials);
  for_each_trial_block(seed, trials, threads, [&](Rng& rng, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += 1.0 / dist.sample_gap(rng);
      values[t] = s / out.scale;
    }
  });
  CompensatedSum sum;
  for (double v : values) sum += v;
  const auto sorted = sorted_copy(std::move(values));
  out.trials = trials;
  out.median = lower_quantile(sorted, 0.5);
  out.q25 = lower_quantile(sorted, 0.25);
  out.q75 = lower_quantile(sorted, 0.75);
  out.iqr = out.q75 - out.q25;
  out.mean = sum.value() / static_cast<double>(trials);
  return out;
}

ExtremeValue extreme_value(const OverlapDistribution& dist, std::size_t n, std::size_t trials,
                           std::uint64_t seed, unsigned threads) {
  if (n == 0 || trials < 10000) {
    throw DomainError("extreme value check needs n >= 1 and at least 10000 trials");
  }
  const auto tp = dist.tail_parameters();
  const double alpha = tp.alpha;
  const double nscale = power_scale(static_cast<double>(n), alpha);
  // P(gap <= t) ~ (c / alpha) t^alpha near 0.
  const double normalizer = std::pow(tp.density_constant / alpha, 1.0 / alpha) * nscale;

  std::vector<double> gaps(trials);
  for_each_trial_block(seed, trials, threads, [&](Rng& rng, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      double v_min = 1.0;
      for (std::size_t i = 0; i < n; ++i) v_min = std::min(v_min, 1.0 - uniform01(rng));
      gaps[t] = dist.gap_from_uniform(v_min);
    }
  });

  CompensatedSum sum;
  for (double g : gaps) sum += g;
  const double mean = sum.value() / static_cast<double>(trials);
  CompensatedSum sq;
  for (double g : gaps) sq += (g - mean) * (g - mean);
  const double se =
      std::sqrt(sq.value() / static_cast<double>(trials - 1) / static_cast<double>(trials));

  std::vector<double> scaled(trials);
  for (std::size_t t = 0; t < trials; ++t) scaled[t] = gaps[t] * normalizer;
  std::sort(scaled.begin(), scaled.end());
  double ks = 0.0;
  const double m = static_cast<double>(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const double G = -std::expm1(-std::pow(scaled[i], alpha));
    ks = std::max({ks, std::fabs(static_cast<double>(i + 1) / m - G),
                   std::fabs(G - static_cast<double>(i) / m)});
  }
  return {n, trials, mean, se, mean * nscale, ks};
}

ExtremeValueSweep extreme_value_sweep(const OverlapDistribution& dist,
                                      const std::vector<std::size_t>& n_values,
                                      std::size_t trials, std::uint64_t seed, unsigned threads) {
  if (n_values.size() < 2) throw DomainError("extreme value sweep needs >= 2 values of n");
  const auto tp = dist.tail_parameters();
  ExtremeValueSweep out;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    out.points.push_back(extreme_value(dist, n_values[i], trials, derive_seed(seed, i), threads));
    xs.push_back(std::log(static_cast<double>(n_values[i])));
    ys.push_back(std::log(out.points.back().mean_min_gap));
  }
  const auto fit = fit_line(xs, ys);
  out.slope = fit.slope;
  out.expected_slope = -1.0 / tp.alpha;
  out.fitted_C = std::exp(fit.intercept);
  const double unit = std::pow(tp.alpha / tp.density_constant, 1.0 / tp.alpha);
  out.C_limit_law = unit * boost::math::tgamma(1.0 + 1.0 / tp.alpha);
  out.C_alternative = unit * boost::math::tgamma(1.0 + tp.alpha);
  const double observed = out.points.back().fitted_C;
  out.matching_form = std::fabs(std::log(observed / out.C_limit_law)) <=
                              std::fabs(std::log(observed / out.C_alternative))
                          ? "limit_law"
                          : "alternative";
  return out;
}

std::string_view to_string(GrowthRegime regime) noexcept {
  switch (regime) {
    case GrowthRegime::PositiveBeta:
      return "beta>0";
    case GrowthRegime::ZeroBeta:
      return "beta=0";
    case GrowthRegime::NegativeBeta:
      return "beta<0";
  }
  return "";
}

AllgenReport allgen_bounds_check(const OverlapDistribution& dist, std::size_t n,
                                 std::size_t trials, std::uint64_t seed,
                                 AllgenConstants constants, unsigned threads) {
  if (n < 2 || trials < 1000) {
    throw DomainError("allgen check needs n >= 2 and at least 1000 trials");
  }
  const auto tp = dist.tail_parameters();
  const double nn = static_cast<double>(n);
  AllgenReport r{};
  r.n = n;
  r.trials = trials;
  r.constants = constants;
  r.outside_analyzed_regime = tp.beta <= -0.5;
  if (tp.beta > 0.0) {
    r.regime = GrowthRegime::PositiveBeta;
    r.lower_scale = power_scale(nn, tp.alpha);
    r.upper_scale = nn;
  } else if (tp.beta == 0.0) {
    r.regime = GrowthRegime::ZeroBeta;
    r.lower_scale = nn;
    r.upper_scale = nn * std::log(nn);
  } else {
    r.regime = GrowthRegime::NegativeBeta;
    r.lower_scale = power_scale(nn, tp.alpha);
    r.upper_scale = r.lower_scale;
  }

  std::vector<double> times(trials);
  for_each_trial_block(seed, trials, threads, [&](Rng& rng, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      times[t] = expected_time_series(sample(dist, n, rng), 1e-7 * nn).T;
    }
  });

  std::size_t within = 0;
  r.min_lower_ratio = std::numeric_limits<double>::infinity();
  r.max_upper_ratio = 0.0;
  std::vector<double> lower_ratios(trials);
  std::vector<double> upper_ratios(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const double lo = times[t] / r.lower_scale;
    const double hi = times[t] / r.upper_scale;
    lower_ratios[t] = lo;
    upper_ratios[t] = hi;
    r.min_lower_ratio = std::min(r.min_lower_ratio, lo);
    r.max_upper_ratio = std::max(r.max_upper_ratio, hi);
    if (lo >= constants.c1 && hi <= constants.c2) ++within;
  }
  r.fraction_within = static_cast<double>(within) / static_cast<double>(trials);
  const auto sorted_lower = sorted_copy(std::move(lower_ratios));
  r.median_lower_ratio = lower_quantile(sorted_lower, 0.5);
  r.low_lower_ratio = lower_quantile(sorted_lower, 0.001);
  r.high_upper_ratio = lower_quantile(sorted_copy(std::move(upper_ratios)), 0.999);
  return r;
}

}  // namespace batchlearn
