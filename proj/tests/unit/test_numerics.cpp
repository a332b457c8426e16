#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "batchlearn/numerics.hpp"

using namespace batchlearn;

TEST(CompensatedSum, RecoversCancelledBits) {
  CompensatedSum s;
  s += 1.0;
  s += 1e-16;
  s += -1.0;
  EXPECT_DOUBLE_EQ(s.value(), 1e-16);
  EXPECT_DOUBLE_EQ(s.abs_total(), 2.0 + 1e-16);
}

TEST(CompensatedSum, HarmonicPartialSum) {
  CompensatedSum s;
  long double ref = 0.0L;
  for (int k = 1; k <= 1000000; ++k) {
    s += 1.0 / k;
    ref += 1.0L / k;
  }
  EXPECT_NEAR(s.value(), static_cast<double>(ref), 4e-16 * 15.0);
}

TEST(Quadrature, Polynomial) {
  const auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-15);
  EXPECT_LE(r.error, 1e-12);
  EXPECT_EQ(integrate([](double) { return 1.0; }, 2.0, 2.0).value, 0.0);
}

TEST(Quadrature, EndpointSingularity) {
  // int_0^1 x^(-1/2) dx = 2 ; int_0^1 log x dx = -1
  EXPECT_NEAR(integrate_endpoint_singular([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0)
                  .value,
              2.0, 1e-12);
  EXPECT_NEAR(
      integrate_endpoint_singular([](double x) { return std::log(x); }, 0.0, 1.0).value, -1.0,
      1e-12);
}

TEST(Quadrature, ToInfinity) {
  EXPECT_NEAR(integrate_to_infinity([](double x) { return 1.0 / (x * x); }, 1.0).value, 1.0,
              1e-12);
  EXPECT_NEAR(integrate_to_infinity([](double x) { return std::exp(-x); }, 2.0).value,
              std::exp(-2.0), 1e-13);
}

TEST(ConvexTail, BracketsPowerSum) {
  // sum_{j > 1000} j^-2 = psi'(1001)
  const double last = 1000.0;
  const auto t = convex_tail_sum([](double x) { return 1.0 / (x * x); }, last);
  long double direct = 0.0L;
  for (long long j = 10000000; j > 1000; --j) direct += 1.0L / (static_cast<long double>(j) * j);
  direct += 1.0L / 10000000.0L;  // remainder beyond 1e7, ~ 1/N
  EXPECT_LE(t.lower, static_cast<double>(direct) + 1e-15);
  EXPECT_GE(t.upper, static_cast<double>(direct) - 1e-15);
  EXPECT_NEAR(t.estimate, static_cast<double>(direct), t.error + 1e-14);
  EXPECT_LT(t.error, 1e-9);
}

TEST(Binomial, RealArgument) {
  EXPECT_DOUBLE_EQ(binomial_real(5.0, 2), 10.0);
  EXPECT_DOUBLE_EQ(binomial_real(0.5, 2), -0.125);
  EXPECT_DOUBLE_EQ(binomial_real(3.0, 0), 1.0);
}

TEST(FitLine, ExactLine) {
  std::vector<double> x{1, 2, 3, 4};
  std::vector<double> y{3, 5, 7, 9};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.rmse, 0.0, 1e-14);
}

TEST(LowerQuantile, OrderStatistic) {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(lower_quantile(v, 0.5), 5.0);
  EXPECT_EQ(lower_quantile(v, 0.9), 9.0);
  EXPECT_EQ(lower_quantile(v, 0.91), 10.0);
  EXPECT_EQ(lower_quantile(v, 0.0), 1.0);
  EXPECT_EQ(lower_quantile(v, 1.0), 10.0);
}
