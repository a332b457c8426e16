#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "batchlearn/random.hpp"

namespace batchlearn {

enum class Family { Uniform, PowerTail, ScaledSupport };

// Behaviour of the density at 1: f(1 - x) ~ density_constant * x^beta, which
// makes the moments decay like m_k ~ moment_constant * k^(-alpha).
struct TailParameters {
  double alpha;             // beta + 1
  double beta;
  double density_constant;  // c in f(1 - x) ~ c x^beta
  double moment_constant;   // lim m_k k^alpha = c * Gamma(beta + 1)
};

// Law F of the i.i.d. overlaps p_i on [0, 1].
//
//   Uniform                 f(x) = 1
//   PowerTail(beta)         f(x) = (1 + beta)(1 - x)^beta,  beta > -1
//   ScaledSupport(a, inner) law of a * X with X ~ inner,   0 < a <= 1
//
// Objects are immutable and cheap to copy; share freely across threads.
class OverlapDistribution {
 public:
  static OverlapDistribution uniform();
  static OverlapDistribution power_tail(double beta);
  static OverlapDistribution scaled(double a, const OverlapDistribution& inner);

  // Parses "uniform", "powertail:beta=<float>", "scaled:a=<float>,inner=<spec>".
  static OverlapDistribution parse(std::string_view spec);
  // Inverse of parse(); floats use 17 significant digits.
  std::string spec() const;

  Family family() const noexcept { return family_; }
  double beta() const noexcept { return beta_; }
  double scale() const noexcept { return a_; }
  const OverlapDistribution& inner() const;

  double density(double x) const;
  double cdf(double x) const;

  // m_k = E[X^k], closed form, k >= 1.
  double moment(long long k) const;
  // The monotone interpolation m(x) = M(f)(x + 1) of the moment sequence,
  // defined for real x > -1. Log-convex and decreasing for x >= 0.
  double moment_at(double x) const;

  // Throws NoPowerTailError when the support stops short of 1.
  TailParameters tail_parameters() const;
  // alpha, or +infinity when the support is bounded away from 1.
  double convergence_exponent() const;
  bool has_power_tail() const noexcept;

  // Gap 1 - X as a nondecreasing function of a uniform variate v in (0, 1].
  // Minimum of gaps is the image of the minimum of the uniforms.
  double gap_from_uniform(double v) const;
  // One draw of the gap 1 - X, strictly positive.
  double sample_gap(Rng& rng) const;
  // One draw of X in [0, 1).
  double sample(Rng& rng) const;

  friend bool operator==(const OverlapDistribution& a, const OverlapDistribution& b);

 private:
  OverlapDistribution(Family family, double beta, double a,
                      std::shared_ptr<const OverlapDistribution> inner);

  Family family_;
  double beta_;
  double a_;
  std::shared_ptr<const OverlapDistribution> inner_;
};

// A realized vector (p_1, ..., p_n) of overlaps, each in [0, 1).
struct OverlapVector {
  std::vector<double> p;

  std::size_t size() const noexcept { return p.size(); }
  bool empty() const noexcept { return p.empty(); }
};

// n i.i.d. draws from dist. A draw that rounds to exactly 1.0 is redrawn.
OverlapVector sample(const OverlapDistribution& dist, std::size_t n, Rng& rng);

inline double density(const OverlapDistribution& dist, double x) { return dist.density(x); }
inline double cdf(const OverlapDistribution& dist, double x) { return dist.cdf(x); }
inline double moment(const OverlapDistribution& dist, long long k) { return dist.moment(k); }
inline TailParameters tail_parameters(const OverlapDistribution& dist) {
  return dist.tail_parameters();
}

// Parses a comma-separated list of floats ("0.5,0.25"); throws ConfigError.
std::vector<double> parse_float_list(std::string_view csv);

}  // namespace batchlearn
