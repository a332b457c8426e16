#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "batchlearn/distributions.hpp"

namespace batchlearn {

// Exact quantities for a fixed overlap vector under the independence
// hypothesis: a word for R_0 also names R_i with probability p_i,
// independently across i and across words.

// q_k: probability that some wrong concept survives k words,
//   q_k = 1 - prod_i (1 - p_i^k).
double survival(std::span<const double> p, std::int64_t k);
inline double survival(const OverlapVector& p, std::int64_t k) { return survival(p.p, k); }

struct Sandwich {
  double lower;  // max_i p_i^k
  double upper;  // min(1, sum_i p_i^k)
};
Sandwich sandwich(std::span<const double> p, std::int64_t k);
inline Sandwich sandwich(const OverlapVector& p, std::int64_t k) { return sandwich(p.p, k); }

struct ExpectedTime {
  double T;                  // sum_{k >= 1} q_k
  double steps_expectation;  // E[k_0] = sum_{k >= 0} q_k = T + 1 (0 when n = 0)
  double error_bound;        // bounds the error of both T and steps_expectation
};

// T = sum_{k>=1} (1 - prod_i (1 - p_i^k)), to absolute accuracy eps.
// Summation runs over the overlaps still relevant at step k; once at most ten
// remain (up to 18 when that is cheaper), their tail is summed exactly by
// inclusion-exclusion.
ExpectedTime expected_time_series(std::span<const double> p, double eps = 1e-10);
inline ExpectedTime expected_time_series(const OverlapVector& p, double eps = 1e-10) {
  return expected_time_series(p.p, eps);
}

inline constexpr std::size_t kMaxSubsetOverlaps = 25;

// T = sum over nonempty subsets s of (-1)^(|s|-1) (1/(1 - p_s) - 1), p_s the
// product over s. Gray-code enumeration over the nonzero overlaps, of which
// there may be at most kMaxSubsetOverlaps.
double expected_time_subsets(std::span<const double> p);
inline double expected_time_subsets(const OverlapVector& p) {
  return expected_time_subsets(p.p);
}

// Smallest k >= 1 with q_k <= delta.
std::int64_t n_delta(std::span<const double> p, double delta);
inline std::int64_t n_delta(const OverlapVector& p, double delta) { return n_delta(p.p, delta); }

struct CoarseBounds {
  double upper;  // sum_i 1/(1 - p_i)
  double lower;  // max_i 1/(1 - p_i)
};
// Bounds on the expected number of words E[k_0] = T + 1.
CoarseBounds coarse_bounds(std::span<const double> p);
inline CoarseBounds coarse_bounds(const OverlapVector& p) { return coarse_bounds(p.p); }

}  // namespace batchlearn
