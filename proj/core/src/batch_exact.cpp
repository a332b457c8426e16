#include "batchlearn/batch_exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "batchlearn/errors.hpp"
#include "batchlearn/numerics.hpp"

namespace batchlearn {
namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();
// Overlaps still active when the closed-form subset tail takes over; up to
// kMaxClosedFormTail when that is cheaper than stepping on.
constexpr std::size_t kClosedFormTail = 10;
constexpr std::size_t kMaxClosedFormTail = 18;
constexpr std::int64_t kMaxSteps = std::int64_t{1} << 40;

void check_overlaps(std::span<const double> p, bool allow_one) {
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw DomainError("overlap " + std::to_string(x) + " outside [0, 1]");
    }
    if (x == 1.0 && !allow_one) {
      throw DivergenceError("an overlap equal to 1 is never ruled out: expected time is infinite");
    }
  }
}

double power(double p, std::int64_t k) {
  if (p == 0.0) return 0.0;
  // Repeated squaring is accurate to a few ulps; exp(k log p) loses
  // |k log p| ulps, which matters for tiny p.
  if (k <= 64) {
    double result = 1.0;
    double base = p;
    for (std::int64_t e = k; e > 0; e >>= 1) {
      if (e & 1) result *= base;
      base *= base;
    }
    return result;
  }
  return std::exp(static_cast<double>(k) * std::log(p));
}

// -log(1 - x) for x in [0, 1).
double neg_log1m(double x) {
  if (x < 1e-5) return x * (1.0 + x * (0.5 + x * (1.0 / 3.0)));
  return -std::log1p(-x);
}

// prod_i (1 - x_i), four independent chains so the loop vectorizes. Returns 0
// once the product is below 1e-150, before it can reach subnormal range.
double survivor_product(std::span<const double> x) {
  double a = 1.0, b = 1.0, c = 1.0, d = 1.0;
  std::size_t i = 0;
  while (i + 4 <= x.size()) {
    const std::size_t stop = std::min(x.size() - x.size() % 4, i + 64);
    for (; i < stop; i += 4) {
      a *= 1.0 - x[i];
      b *= 1.0 - x[i + 1];
      c *= 1.0 - x[i + 2];
      d *= 1.0 - x[i + 3];
    }
    if (std::min({a, b, c, d}) < 1e-150) return 0.0;
  }
  for (; i < x.size(); ++i) a *= 1.0 - x[i];
  return (a * b) * (c * d);
}

struct SignedSubsetSum {
  double value;
  double abs_total;
};

// sum over nonempty subsets s of (-1)^(|s|-1) p_s^k0 / (1 - p_s), with
// log p_s carried along a Gray-code walk (one add or subtract per subset).
SignedSubsetSum geometric_subset_sum(std::span<const double> log_p, std::int64_t k0) {
  const std::size_t n = log_p.size();
  CompensatedSum sum;
  double log_ps = 0.0;
  int cardinality = 0;
  std::uint64_t prev = 0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < count; ++i) {
    const std::uint64_t gray = i ^ (i >> 1);
    const int bit = std::countr_zero(gray ^ prev);
    if (gray & (std::uint64_t{1} << bit)) {
      log_ps += log_p[bit];
      ++cardinality;
    } else {
      log_ps -= log_p[bit];
      --cardinality;
    }
    prev = gray;
    if ((i & 0xff) == 0) {
      log_ps = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        if (gray & (std::uint64_t{1} << b)) log_ps += log_p[b];
      }
    }
    const double numerator = std::exp(static_cast<double>(k0) * log_ps);
    const double term = numerator / -std::expm1(log_ps);
    sum += (cardinality & 1) ? term : -term;
  }
  return {sum.value(), sum.abs_total()};
}

}  // namespace

double survival(std::span<const double> p, std::int64_t k) {
  if (k < 1) throw DomainError("survival needs k >= 1");
  check_overlaps(p, true);
  double log_learned = 0.0;
  for (double x : p) {
    const double xk = power(x, k);
    if (xk >= 1.0) return 1.0;
    log_learned -= neg_log1m(xk);
  }
  return -std::expm1(log_learned);
}

Sandwich sandwich(std::span<const double> p, std::int64_t k) {
  if (k < 1) throw DomainError("sandwich needs k >= 1");
  check_overlaps(p, true);
  double lower = 0.0;
  double upper = 0.0;
  for (double x : p) {
    const double xk = power(x, k);
    lower = std::max(lower, xk);
    upper += xk;
  }
  return {lower, std::min(1.0, upper)};
}

ExpectedTime expected_time_series(std::span<const double> p, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  check_overlaps(p, false);
  if (p.empty()) return {0.0, 0.0, 0.0};

  std::vector<double> sorted;
  sorted.reserve(p.size());
  for (double x : p) {
    if (x > 0.0) sorted.push_back(x);
  }
  if (sorted.empty()) return {0.0, 1.0, 0.0};
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  const std::size_t m = sorted.size();
  std::vector<double> log_p(m);
  std::vector<double> inv_gap(m);
  std::vector<double> xk(sorted);  // p_i^k
  for (std::size_t i = 0; i < m; ++i) {
    log_p[i] = std::log(sorted[i]);
    inv_gap[i] = 1.0 / (1.0 - sorted[i]);
  }

  // An overlap is retired once its whole remaining contribution
  // sum_{j >= k} p_i^j = p_i^k / (1 - p_i) drops below this budget.
  const double retire_budget = eps / (4.0 * static_cast<double>(m));
  CompensatedSum total;
  double retired = 0.0;
  double closed_form_rounding = 0.0;
  double product_rounding = 0.0;
  std::size_t active = m;

  // Steps until the overlap at index i retires.
  auto steps_to_retire = [&](std::size_t i) {
    return std::log(retire_budget / (xk[i] * inv_gap[i])) / log_p[i];
  };

  for (std::int64_t k = 1;; ++k) {
    while (active > 0 && xk[active - 1] * inv_gap[active - 1] <= retire_budget) {
      --active;
      retired += xk[active] * inv_gap[active];
    }
    const bool close_now =
        active <= kClosedFormTail ||
        (active <= kMaxClosedFormTail &&
         std::ldexp(32.0, static_cast<int>(active)) <
             steps_to_retire(kClosedFormTail) * static_cast<double>(active));
    if (close_now) {
      const auto tail = geometric_subset_sum({log_p.data(), active}, k);
      total += tail.value;
      closed_form_rounding = 8.0 * kUlp * tail.abs_total;
      break;
    }
    if (k > kMaxSteps) {
      throw PrecisionError("expected_time_series: too many overlaps remain close to 1");
    }

    // While some overlap is still likely to survive, q_k = 1 - prod(1 - p_i^k)
    // is well conditioned and the plain product is enough; near the end the
    // hazard sum keeps the relative accuracy of small q_k.
    const double learned = survivor_product({xk.data(), active});
    if (learned <= 0.5) {
      total += 1.0 - learned;
      product_rounding += static_cast<double>(active + 2) * kUlp * learned;
    } else {
      double hazard = 0.0;
      for (std::size_t i = 0; i < active; ++i) hazard += neg_log1m(xk[i]);
      total += -std::expm1(-hazard);
    }

    if ((k & 0xff) == 0) {
      for (std::size_t i = 0; i < active; ++i) {
        xk[i] = std::exp(static_cast<double>(k + 1) * log_p[i]);
      }
    } else {
      for (std::size_t i = 0; i < active; ++i) xk[i] *= sorted[i];
    }
  }

  const double T = total.value();
  const double error =
      retired + closed_form_rounding + product_rounding + 4.0 * kUlp * total.abs_total() +
      kUlp * (T + 1.0);  // covers rounding T + 1 as well
  return {T, T + 1.0, error};
}

double expected_time_subsets(std::span<const double> p) {
  check_overlaps(p, false);
  // Subsets containing a zero overlap contribute 1/(1-0) - 1 = 0.
  std::vector<double> log_p;
  for (double x : p) {
    if (x > 0.0) log_p.push_back(std::log(x));
  }
  if (log_p.size() > kMaxSubsetOverlaps) {
    throw SizeLimitError("subset enumeration limited to n <= " +
                         std::to_string(kMaxSubsetOverlaps) + " nonzero overlaps, got " +
                         std::to_string(log_p.size()));
  }
  return geometric_subset_sum(log_p, 1).value;
}

std::int64_t n_delta(std::span<const double> p, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  check_overlaps(p, false);
  std::int64_t hi = 1;
  while (survival(p, hi) > delta) {
    if (hi > kMaxSteps) throw PrecisionError("n_delta: search exceeded 2^40 steps");
    hi *= 2;
  }
  if (hi == 1) return 1;
  std::int64_t lo = hi / 2;  // survival(lo) > delta
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (survival(p, mid) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

CoarseBounds coarse_bounds(std::span<const double> p) {
  check_overlaps(p, false);
  double upper = 0.0;
  double lower = 0.0;
  for (double x : p) {
    const double g = 1.0 / (1.0 - x);
    upper += g;
    lower = std::max(lower, g);
  }
  return {upper, lower};
}

}  // namespace batchlearn
