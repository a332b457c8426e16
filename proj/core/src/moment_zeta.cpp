#include "batchlearn/moment_zeta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include "batchlearn/errors.hpp"
#include "batchlearn/numerics.hpp"

namespace batchlearn {
namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();
constexpr std::int64_t kInitialTerms = 1000;
constexpr std::int64_t kMaxTerms = std::int64_t{1} << 26;

// Mellin transform of (1 + beta)(1 - x)^beta.
double mellin_power_tail(double beta, double s) {
  const double c = 1.0 + beta;
  const double delta = std::min(1e-6, 0.1 / s);
  const double cut = 1.0 - delta;

  // int_0^delta c u^beta (1 - u)^(s-1) du, expanded in powers of u.
  CompensatedSum near;
  double coeff = 1.0;
  for (int j = 0; j < 400; ++j) {
    if (j > 0) coeff *= -(s - j) / j;
    const double term = c * coeff * std::pow(delta, beta + 1.0 + j) / (beta + 1.0 + j);
    near += term;
    if (std::fabs(term) <= 1e-18 * std::fabs(near.value())) break;
  }

  auto integrand = [beta, c, s](double x) {
    return c * std::pow(1.0 - x, beta) * std::pow(x, s - 1.0);
  };

  CompensatedSum body;
  double lo = 0.0;
  if (s < 1.0) {
    // x = t^(1/s) removes the x^(s-1) singularity at 0.
    const double hi_t = std::pow(0.5, s);
    auto substituted = [beta, c, s](double t) {
      return c * std::pow(1.0 - std::pow(t, 1.0 / s), beta) / s;
    };
    body += integrate(substituted, 0.0, hi_t).value;
    lo = 0.5;
  }
  // Dyadic pieces towards 1 keep each panel smooth when x^(s-1) is sharply
  // peaked or (1-x)^beta is singular.
  double width = 1.0 - lo;
  while (lo < cut) {
    width *= 0.5;
    const double hi = std::min(cut, 1.0 - width);
    if (hi > lo) body += integrate(integrand, lo, hi).value;
    lo = hi;
  }
  return body.value() + near.value();
}

}  // namespace

MomentSequence::MomentSequence(OverlapDistribution dist)
    : dist_(std::move(dist)),
      alpha_(dist_.convergence_exponent()),
      tail_constant_(dist_.has_power_tail() ? dist_.tail_parameters().moment_constant : 0.0) {}

double MomentSequence::operator()(std::size_t k) const {
  if (k == 0) throw DomainError("moment index starts at 1");
  {
    std::shared_lock lock(mutex_);
    if (k <= cache_.size()) return cache_[k - 1];
  }
  std::unique_lock lock(mutex_);
  while (cache_.size() < k) {
    cache_.push_back(dist_.moment(static_cast<long long>(cache_.size() + 1)));
  }
  return cache_[k - 1];
}

std::size_t MomentSequence::cached() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

double mellin(const OverlapDistribution& dist, double s) {
  if (!(s > 0.0)) {
    throw DivergenceError("Mellin transform diverges for s <= 0 (s = " + std::to_string(s) + ")");
  }
  switch (dist.family()) {
    case Family::Uniform:
      return mellin_power_tail(0.0, s);
    case Family::PowerTail:
      return mellin_power_tail(dist.beta(), s);
    case Family::ScaledSupport:
      return std::pow(dist.scale(), s - 1.0) * mellin(dist.inner(), s);
  }
  return 0.0;
}

double moment_by_quadrature(const OverlapDistribution& dist, long long k) {
  if (k < 1) throw DomainError("moment order must be >= 1");
  return mellin(dist, static_cast<double>(k) + 1.0);
}

ZetaResult zeta_with_terms(const OverlapDistribution& dist, double s, std::int64_t terms) {
  const double alpha = dist.convergence_exponent();
  if (!(s > 0.0) || !(s * alpha > 1.0)) {
    throw DivergenceError("moment zeta function diverges: s * alpha = " +
                          std::to_string(s * alpha) + " <= 1");
  }
  if (terms < 1) throw DomainError("zeta needs at least one explicit term");

  MomentSequence moments(dist);
  CompensatedSum partial;
  for (std::int64_t k = 1; k <= terms; ++k) {
    partial += std::pow(moments(static_cast<std::size_t>(k)), s);
  }
  const auto tail = convex_tail_sum(
      [&dist, s](double x) { return std::pow(dist.moment_at(x), s); },
      static_cast<double>(terms));
  const double rounding = 4.0 * kUlp * (partial.abs_total() + std::fabs(tail.estimate));
  return {partial.value() + tail.estimate, terms, tail.error + rounding};
}

ZetaResult zeta(const OverlapDistribution& dist, double s, double eps) {
  if (!(eps > 0.0)) throw DomainError("zeta tolerance must be positive");
  for (std::int64_t terms = kInitialTerms;; terms *= 2) {
    auto result = zeta_with_terms(dist, s, terms);
    if (result.error_bound <= eps) return result;
    if (terms >= kMaxTerms) {
      throw PrecisionError("zeta(" + std::to_string(s) + ") could not reach eps = " +
                           std::to_string(eps) + "; best bound " +
                           std::to_string(result.error_bound));
    }
  }
}

ZetaExpectationCheck verify_zeta_expectation(const OverlapDistribution& dist, std::size_t n,
                                             std::size_t trials, std::uint64_t seed,
                                             unsigned threads) {
  const double alpha = dist.convergence_exponent();
  if (!(static_cast<double>(n) * alpha > 1.0)) {
    throw DivergenceError("E[1/(1 - x_1...x_n)] is infinite: n * alpha = " +
                          std::to_string(static_cast<double>(n) * alpha) + " <= 1");
  }
  if (trials < 2) throw DomainError("need at least two trials");

  std::vector<double> values(trials);
  for_each_trial_block(seed, trials, threads, [&](Rng& rng, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      double log_product = 0.0;
      for (std::size_t i = 0; i < n; ++i) log_product += std::log1p(-dist.sample_gap(rng));
      // x / (1 - x) = sum_{k >= 1} x^k, matching zeta's sum from k = 1.
      values[t] = std::exp(log_product) / -std::expm1(log_product);
    }
  });

  CompensatedSum sum;
  for (double v : values) sum += v;
  const double mean = sum.value() / static_cast<double>(trials);
  CompensatedSum sq;
  for (double v : values) sq += (v - mean) * (v - mean);
  const double variance = sq.value() / static_cast<double>(trials - 1);
  const double se = std::sqrt(variance / static_cast<double>(trials));

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t clipped = (trials + 9999) / 10000;
  const double cap = sorted[trials - clipped - 1];
  CompensatedSum wins;
  for (double v : sorted) wins += std::min(v, cap);

  const auto z = zeta(dist, static_cast<double>(n), 1e-12);
  return {mean,
          z.value,
          z.error_bound,
          se,
          (mean - z.value) / se,
          static_cast<double>(n) * alpha > 2.0,
          wins.value() / static_cast<double>(trials),
          trials};
}

}  // namespace batchlearn
