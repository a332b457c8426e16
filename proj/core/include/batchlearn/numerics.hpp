#pragma once

#include <cmath>
#include <functional>
#include <span>

namespace batchlearn {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    abs_ += std::fabs(x);
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }
  // Sum of |terms|; bounds the rounding error as abs_total * few ulp.
  double abs_total() const noexcept { return abs_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double abs_ = 0.0;
};

struct QuadratureResult {
  double value;
  double error;
};

using RealFunction = std::function<double(double)>;

// Adaptive Gauss-Kronrod (31 point) on a finite interval.
QuadratureResult integrate(const RealFunction& f, double a, double b, double rel_tol = 1e-13);

// Double-exponential quadrature on [a, b]; tolerates integrable endpoint
// singularities.
QuadratureResult integrate_endpoint_singular(const RealFunction& f, double a, double b,
                                             double rel_tol = 1e-13);

// Integral of f over [a, infinity) via x = a / u, for f decaying at least like
// x^(-1-epsilon). Requires a > 0.
QuadratureResult integrate_to_infinity(const RealFunction& f, double a, double rel_tol = 1e-13);

// Bracket for the tail sum  sum_{j > last} h(j)  of a convex, decreasing,
// integrable h:
//   lower = int_{last+1}^inf h + h(last+1)/2   (trapezoid over-estimates)
//   upper = int_{last+1/2}^inf h               (midpoint under-estimates)
// `estimate` is the midpoint of the bracket and `error` its half-width plus
// the quadrature error.
struct TailSum {
  double estimate;
  double error;
  double lower;
  double upper;
};

TailSum convex_tail_sum(const RealFunction& h, double last);

// Generalized binomial coefficient C(r, j) for real r.
double binomial_real(double r, int j);


struct LinearFit {
  double slope;
  double intercept;
  double rmse;  // root mean squared residual
};

// Ordinary least squares y = intercept + slope * x. Needs >= 2 distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Empirical quantile by lower order statistic: sorted[ceil(level * n) - 1],
// clamped to the sample. `sorted` must be ascending and nonempty.
double lower_quantile(std::span<const double> sorted, double level);

}  // namespace batchlearn
