#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "batchlearn/errors.hpp"
#include "batchlearn/moment_zeta.hpp"

using namespace batchlearn;

namespace {

const OverlapDistribution kUniform = OverlapDistribution::uniform();
const OverlapDistribution kBeta1 = OverlapDistribution::power_tail(1.0);

// sum_{k=1}^{N} (k+1)^-s plus the integral tail int_{N+3/2}^inf x^-s dx
// (midpoint rule for the convex remainder).
double uniform_zeta_oracle(double s) {
  const long long N = 10000000;
  long double sum = 0.0L;
  for (long long k = N; k >= 1; --k) sum += std::pow(static_cast<long double>(k + 1), -s);
  const double a = static_cast<double>(N) + 1.5;
  return static_cast<double>(sum) + std::pow(a, 1.0 - s) / (s - 1.0);
}

}  // namespace

TEST(MomentSequence, CachesClosedForms) {
  MomentSequence m(kBeta1);
  EXPECT_EQ(m.cached(), 0u);
  EXPECT_NEAR(m(3), 0.1, 1e-16);
  EXPECT_GE(m.cached(), 3u);
  EXPECT_EQ(m(1000), kBeta1.moment(1000));
  EXPECT_DOUBLE_EQ(m.alpha(), 2.0);
  EXPECT_NEAR(m.tail_constant(), 2.0, 1e-14);
}

TEST(MomentSequence, ConcurrentReaders) {
  MomentSequence m(kUniform);
  std::vector<std::thread> pool;
  std::vector<double> got(4);
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t k = 1; k <= 5000; ++k) got[t] += m(k);
    });
  }
  for (auto& th : pool) th.join();
  for (int t = 1; t < 4; ++t) EXPECT_EQ(got[t], got[0]);
}

TEST(Mellin, Examples) {
  EXPECT_NEAR(mellin(kUniform, 3.0), 1.0 / 3.0, 1e-10 / 3.0);
  EXPECT_NEAR(mellin(kBeta1, 2.0), 1.0 / 3.0, 1e-10 / 3.0);
  for (long long k = 1; k <= 50; ++k) {
    EXPECT_NEAR(mellin(kUniform, k + 1.0), kUniform.moment(k), 1e-10 * kUniform.moment(k));
  }
}

TEST(Mellin, AgreesWithMomentsUpTo100) {
  for (const auto& dist : {kUniform, kBeta1, OverlapDistribution::power_tail(-0.5),
                           OverlapDistribution::power_tail(2.5),
                           OverlapDistribution::scaled(0.8, kBeta1)}) {
    for (long long k : {1, 2, 3, 10, 33, 64, 100}) {
      const double m = dist.moment(k);
      EXPECT_NEAR(moment_by_quadrature(dist, k), m, 1e-10 * m) << dist.spec() << " k=" << k;
    }
  }
}

TEST(Mellin, SmallArgumentUsesSingularity) {
  // Uniform: 1/s, PowerTail beta: B(s, beta + 1)(1 + beta)
  EXPECT_NEAR(mellin(kUniform, 0.25), 4.0, 4e-10);
  const double b = std::tgamma(0.5) * std::tgamma(0.5) / std::tgamma(1.0) * 0.5;
  EXPECT_NEAR(mellin(OverlapDistribution::power_tail(-0.5), 0.5), b, 1e-10 * b);
}

TEST(Mellin, NonPositiveDiverges) {
  EXPECT_THROW(mellin(kUniform, 0.0), DivergenceError);
  EXPECT_THROW(mellin(kUniform, -1.0), DivergenceError);
}

TEST(Zeta, UniformAgainstDirectSummation) {
  const auto z2 = zeta(kUniform, 2.0);
  const auto z3 = zeta(kUniform, 3.0);
  EXPECT_NEAR(z2.value, uniform_zeta_oracle(2.0), 1e-8);
  EXPECT_NEAR(z3.value, uniform_zeta_oracle(3.0), 1e-8);
  EXPECT_NEAR(z2.value, std::numbers::pi * std::numbers::pi / 6.0 - 1.0, 1e-8);
  EXPECT_NEAR(z3.value, 1.2020569031595942 - 1.0, 1e-8);
  EXPECT_LE(z2.error_bound, 1e-12);
  EXPECT_GE(z2.terms, 1000);
}

TEST(Zeta, PowerTailTelescopes) {
  const auto z = zeta(kBeta1, 1.0);
  EXPECT_NEAR(z.value, 1.0, 1e-8);
  EXPECT_LE(std::fabs(z.value - 1.0), z.error_bound + 1e-15);
}

TEST(Zeta, DivergenceSignalled) {
  EXPECT_THROW(zeta(kUniform, 1.0), DivergenceError);
  EXPECT_THROW(zeta(kBeta1, 0.5), DivergenceError);
  EXPECT_THROW(zeta(OverlapDistribution::power_tail(-0.5), 2.0), DivergenceError);
  EXPECT_NO_THROW(zeta(OverlapDistribution::power_tail(-0.5), 2.5));
}

TEST(Zeta, StrictlyDecreasingInS) {
  for (const auto& dist : {kUniform, kBeta1}) {
    double prev = zeta(dist, 1.25 / dist.convergence_exponent() + 0.0).value;
    for (double s = 1.5; s <= 12.0; s += 0.5) {
      const double z = zeta(dist, s).value;
      EXPECT_LT(z, prev) << dist.spec() << " s=" << s;
      prev = z;
    }
  }
}

TEST(Zeta, DominatedByFirstMomentForLargeS) {
  for (const auto& dist : {kUniform, kBeta1, OverlapDistribution::power_tail(-0.5)}) {
    const double m1 = dist.moment(1);
    EXPECT_NEAR(zeta(dist, 200.0).value / std::pow(m1, 200.0), 1.0, 1e-6) << dist.spec();
  }
}

TEST(Zeta, TruncationHonesty) {
  for (const auto& dist : {kUniform, kBeta1, OverlapDistribution::power_tail(-0.5)}) {
    const double s = 3.0 / dist.convergence_exponent();
    for (std::int64_t K : {100, 1000, 10000}) {
      const auto a = zeta_with_terms(dist, s, K);
      const auto b = zeta_with_terms(dist, s, 2 * K);
      EXPECT_LE(std::fabs(a.value - b.value), a.error_bound) << dist.spec() << " K=" << K;
    }
  }
}

TEST(Zeta, BoundedSupportConvergesForAnyS) {
  const auto d = OverlapDistribution::scaled(0.5, kUniform);
  // m_k = 0.5^k / (k + 1)
  double direct = 0.0;
  for (int k = 200; k >= 1; --k) direct += std::pow(0.5, k) / (k + 1.0);
  EXPECT_NEAR(zeta(d, 1.0).value, direct, 1e-12);
}

TEST(ZetaExpectation, PowerTailN1) {
  const auto c = verify_zeta_expectation(kBeta1, 1, 1000000, 5);
  EXPECT_NEAR(c.zeta_value, 1.0, 1e-10);
  EXPECT_LT(std::fabs(c.z_score), 4.0) << c.mc_estimate << " +- " << c.stderr_mean;
  EXPECT_FALSE(c.finite_variance);
}

TEST(ZetaExpectation, UniformN3FiniteVariance) {
  const auto c = verify_zeta_expectation(kUniform, 3, 200000, 6);
  EXPECT_TRUE(c.finite_variance);
  EXPECT_NEAR(c.zeta_value, 0.2020569031595942, 1e-10);
  EXPECT_LT(std::fabs(c.z_score), 4.0);
}

TEST(ZetaExpectation, UniformN1Diverges) {
  EXPECT_THROW(verify_zeta_expectation(kUniform, 1, 1000, 1), DivergenceError);
}

TEST(ZetaExpectation, ThreadIndependent) {
  const auto a = verify_zeta_expectation(kUniform, 2, 50000, 9, 1);
  const auto b = verify_zeta_expectation(kUniform, 2, 50000, 9, 3);
  EXPECT_EQ(a.mc_estimate, b.mc_estimate);
  EXPECT_EQ(a.stderr_mean, b.stderr_mean);
  EXPECT_EQ(a.winsorized_mean, b.winsorized_mean);
}
