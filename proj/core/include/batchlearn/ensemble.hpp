#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "batchlearn/distributions.hpp"

namespace batchlearn {

// Expected learning time averaged over overlap vectors drawn i.i.d. from F,
// as a function of the number n of competing concepts.

enum class EnsembleMethod { ZetaSum, MomentSeries, IntegralAsymptotic, MonteCarlo };

std::string_view to_string(EnsembleMethod method) noexcept;
// Accepts zeta_sum, moment_series, integral_asymptotic, monte_carlo.
EnsembleMethod parse_ensemble_method(std::string_view name);

struct EnsembleEstimate {
  std::size_t n = 0;
  EnsembleMethod method = EnsembleMethod::MomentSeries;
  double value = 0.0;
  double error_bound = 0.0;
  // False when no error bound is meaningful (asymptotic formula, or a Monte
  // Carlo median in the alpha <= 1 regime where E[T] does not exist).
  bool error_applicable = true;
  // "mean" for E[T]; "median" for the alpha <= 1 Monte Carlo fallback.
  std::string statistic = "mean";
  // Sum |terms| / |value| of the alternating zeta sum; 1 for other methods.
  double condition = 1.0;
};

// T(n) = -sum_{k=1}^n C(n,k) (-1)^k zeta_F(k). Needs alpha > 1 and n <= 30;
// throws PrecisionError when cancellation exceeds 1e6 ulps.
EnsembleEstimate expected_time_zeta_sum(const OverlapDistribution& dist, std::size_t n);

// T(n) = sum_{j >= 1} [1 - (1 - m_j)^n] with absolute error <= eps.
// Throws DivergenceError when alpha <= 1 (use alpha1_decomposition).
EnsembleEstimate expected_time_moment_series(const OverlapDistribution& dist, std::size_t n,
                                             double eps = 1e-9);

// Leading asymptotic n^(1/alpha) * int_0^inf (1 - exp(-c u^alpha)) / u^2 du,
// c = lim m_k k^alpha. Needs alpha > 1.
EnsembleEstimate expected_time_integral(const OverlapDistribution& dist, std::size_t n);
// The integral factor alone, by quadrature.
double limit_integral(const OverlapDistribution& dist);

// Mean of per-sample T over fresh overlap vectors when alpha > 1; the median
// (error not applicable) otherwise.
EnsembleEstimate expected_time_monte_carlo(const OverlapDistribution& dist, std::size_t n,
                                           std::size_t trials, std::uint64_t seed,
                                           unsigned threads = 1);

// alpha = 1 split T = T1 + T2 with T1 = sum_j (1/(1 - p_j) - 1) and
//   T2 = -sum_j [(1 - m_j)^n - 1 + n m_j],
// whose leading behaviour is -c n log n, c = lim j m_j.
struct Alpha1Decomposition {
  std::size_t n;
  double T2;
  double T2_error;
  double c;              // Richardson extrapolation of j m_j
  double c_log_term;     // c n log n
  double T2_over_nlogn;  // T2 / (n log n), tends to -c
  std::int64_t terms;
};
Alpha1Decomposition alpha1_decomposition(const OverlapDistribution& dist, std::size_t n,
                                         double eps = 1e-8);

// lim_{j -> inf} j^alpha m_j extrapolated from j in {1000, 2000, 4000}.
double richardson_moment_constant(const OverlapDistribution& dist, double alpha);

// Per-sample T / n over fresh overlap vectors; T has no mean when alpha = 1,
// so only order statistics and a trimmed mean are reported.
struct LawOfLargeNumbers {
  std::size_t n;
  std::size_t trials;
  double median;
  double q25;
  double q75;
  double trimmed_mean;  // central 98%
};
LawOfLargeNumbers alpha1_law_of_large_numbers(const OverlapDistribution& dist, std::size_t n,
                                              std::size_t trials, std::uint64_t seed,
                                              unsigned threads = 1);

// Distribution of S = sum_i 1/(1 - p_i) normalised by n (beta > 0),
// n log n (beta = 0) or n^(1/(beta+1)) (beta < 0).
struct Concentration {
  std::string normalization;
  double scale;
  std::size_t trials;
  double median;
  double q25;
  double q75;
  double iqr;
  double mean;
};
Concentration sum_inverse_gap_concentration(const OverlapDistribution& dist, std::size_t n,
                                            std::size_t trials, std::uint64_t seed,
                                            unsigned threads = 1);

// Smallest gap min_i (1 - p_i). Its mean decays like C n^(-1/alpha) and
// n^(1/alpha) min gap (scaled by the density constant) tends to the law
// G(x) = 1 - exp(-x^alpha).
struct ExtremeValue {
  std::size_t n;
  std::size_t trials;
  double mean_min_gap;
  double stderr_mean;
  double fitted_C;     // mean_min_gap * n^(1/alpha)
  double ks_distance;  // sup |F_empirical - G| of the rescaled minimum
};
ExtremeValue extreme_value(const OverlapDistribution& dist, std::size_t n, std::size_t trials,
                           std::uint64_t seed, unsigned threads = 1);

struct ExtremeValueSweep {
  std::vector<ExtremeValue> points;
  double slope;           // of log E[min gap] against log n
  double expected_slope;  // -1/alpha
  double fitted_C;        // exp(intercept)
  // Two candidate closed forms for the constant: the mean of the limit law
  // G, int exp(-u^alpha) du, and int exp(-u^(1/alpha)) du. `matching_form`
  // names the one closer to the largest-n estimate.
  double C_limit_law;
  double C_alternative;
  std::string matching_form;
};
ExtremeValueSweep extreme_value_sweep(const OverlapDistribution& dist,
                                      const std::vector<std::size_t>& n_values,
                                      std::size_t trials, std::uint64_t seed,
                                      unsigned threads = 1);

enum class GrowthRegime { PositiveBeta, ZeroBeta, NegativeBeta };
std::string_view to_string(GrowthRegime regime) noexcept;

struct AllgenConstants {
  double c1;
  double c2;
};

// Checks c1 * lower_scale <= T <= c2 * upper_scale per sampled vector, with
//   beta > 0: lower n^(1/alpha), upper n
//   beta = 0: lower n,           upper n log n
//   beta < 0: lower = upper = n^(1/alpha)
struct AllgenReport {
  GrowthRegime regime;
  bool outside_analyzed_regime;  // beta <= -1/2
  std::size_t n;
  std::size_t trials;
  double lower_scale;
  double upper_scale;
  AllgenConstants constants;
  double fraction_within;
  double min_lower_ratio;  // min T / lower_scale
  double max_upper_ratio;  // max T / upper_scale
  double median_lower_ratio;
  double low_lower_ratio;   // 0.1% quantile of T / lower_scale
  double high_upper_ratio;  // 99.9% quantile of T / upper_scale
};
AllgenReport allgen_bounds_check(const OverlapDistribution& dist, std::size_t n,
                                 std::size_t trials, std::uint64_t seed,
                                 AllgenConstants constants, unsigned threads = 1);

}  // namespace batchlearn
