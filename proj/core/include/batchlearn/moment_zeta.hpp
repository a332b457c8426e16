#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <shared_mutex>

#include "batchlearn/distributions.hpp"

namespace batchlearn {

// Append-only cache of m_1, m_2, ... for one distribution. Safe for
// concurrent readers; extension takes an exclusive lock.
class MomentSequence {
 public:
  explicit MomentSequence(OverlapDistribution dist);

  MomentSequence(const MomentSequence&) = delete;
  MomentSequence& operator=(const MomentSequence&) = delete;

  const OverlapDistribution& distribution() const noexcept { return dist_; }
  // m_k for k >= 1, computing and caching m_1..m_k on first access.
  double operator()(std::size_t k) const;
  std::size_t cached() const;

  // Tail exponent and limit of m_k k^alpha (infinite alpha for bounded support).
  double alpha() const noexcept { return alpha_; }
  double tail_constant() const noexcept { return tail_constant_; }

 private:
  OverlapDistribution dist_;
  double alpha_;
  double tail_constant_;
  mutable std::shared_mutex mutex_;
  mutable std::deque<double> cache_;
};

// Mellin transform  M(f)(s) = int_0^1 f(x) x^(s-1) dx  by quadrature, s > 0.
// The last 1e-6 of the interval is integrated in closed form as a binomial
// series in u = 1 - x, which absorbs the u^beta singularity.
double mellin(const OverlapDistribution& dist, double s);

// m_k by quadrature of x^k f(x); independent of the closed forms.
double moment_by_quadrature(const OverlapDistribution& dist, long long k);

struct ZetaResult {
  double value;
  std::int64_t terms;  // K: moments summed explicitly
  double error_bound;  // |value - zeta| <= error_bound
};

// Moment zeta function  zeta_F(s) = sum_{k >= 1} m_k^s  with absolute error
// at most eps. Throws DivergenceError when s * alpha <= 1.
ZetaResult zeta(const OverlapDistribution& dist, double s, double eps = 1e-12);

// Same sum truncated at exactly `terms` explicit moments, tail bracketed by
// integrals of the log-convex interpolation m(x)^s.
ZetaResult zeta_with_terms(const OverlapDistribution& dist, double s, std::int64_t terms);

struct ZetaExpectationCheck {
  double mc_estimate;       // sample mean of x / (1 - x), x = x_1 ... x_n
  double zeta_value;
  double zeta_error;
  double stderr_mean;       // sample standard deviation / sqrt(trials)
  double z_score;           // (mc_estimate - zeta_value) / stderr_mean
  bool finite_variance;     // n * alpha > 2
  double winsorized_mean;   // top 0.01% clamped; diagnostic when variance is infinite
  std::size_t trials;
};

// Monte Carlo check of  E[1 / (1 - x_1 ... x_n)] - 1 = zeta_F(n); the -1
// drops the k = 0 term of the geometric series.
// Throws DivergenceError when n * alpha <= 1 (the expectation is infinite).
ZetaExpectationCheck verify_zeta_expectation(const OverlapDistribution& dist, std::size_t n,
                                             std::size_t trials, std::uint64_t seed,
                                             unsigned threads = 1);

}  // namespace batchlearn
