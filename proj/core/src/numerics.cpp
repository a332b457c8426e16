#include "batchlearn/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace batchlearn {

QuadratureResult integrate(const RealFunction& f, double a, double b, double rel_tol) {
  if (a == b) return {0.0, 0.0};
  // Boost compares an unscaled panel error with a scaled tolerance, so short
  // intervals would subdivide to full depth; integrate over [-1, 1] instead.
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto g = [&](double t) { return f(mid + half * t) * half; };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      g, -1.0, 1.0, 15, rel_tol, &error);
  return {value, error};
}

QuadratureResult integrate_endpoint_singular(const RealFunction& f, double a, double b,
                                             double rel_tol) {
  if (a == b) return {0.0, 0.0};
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(
      [&](double x) {
        const double y = f(x);
        return std::isfinite(y) ? y : 0.0;
      },
      a, b, rel_tol, &error, &l1);
  return {value, error};
}

QuadratureResult integrate_to_infinity(const RealFunction& f, double a, double rel_tol) {
  auto g = [&](double u) -> double {
    if (u <= 0.0) return 0.0;
    const double x = a / u;
    if (!std::isfinite(x)) return 0.0;
    const double y = f(x) * (a / u) / u;
    return std::isfinite(y) ? y : 0.0;
  };
  return integrate_endpoint_singular(g, 0.0, 1.0, rel_tol);
}

TailSum convex_tail_sum(const RealFunction& h, double last) {
  const double start = last + 1.0;
  const auto far = integrate_to_infinity(h, start);
  const auto near = integrate(h, last + 0.5, start);
  const double lower = far.value + 0.5 * h(start);
  const double upper = far.value + near.value;
  const double lo = std::min(lower, upper);
  const double hi = std::max(lower, upper);
  return {0.5 * (lo + hi), 0.5 * (hi - lo) + far.error + near.error, lo, hi};
}

double binomial_real(double r, int j) {
  double c = 1.0;
  for (int i = 0; i < j; ++i) c *= (r - i) / (i + 1);
  return c;
}


LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("fit_line needs >= 2 paired points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line needs distinct x values");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss += r * r;
  }
  return {slope, intercept, std::sqrt(ss / static_cast<double>(n))};
}

double lower_quantile(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::ptrdiff_t>(std::ceil(level * n)) - 1;
  rank = std::clamp<std::ptrdiff_t>(rank, 0, static_cast<std::ptrdiff_t>(sorted.size()) - 1);
  return sorted[static_cast<std::size_t>(rank)];
}

}  // namespace batchlearn
