#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "batchlearn/distributions.hpp"
#include "batchlearn/errors.hpp"
#include "batchlearn/numerics.hpp"

using namespace batchlearn;

namespace {

const OverlapDistribution kUniform = OverlapDistribution::uniform();
const OverlapDistribution kBeta1 = OverlapDistribution::power_tail(1.0);
const OverlapDistribution kBetaHalfNeg = OverlapDistribution::power_tail(-0.5);

std::vector<OverlapDistribution> families() {
  return {kUniform,
          kBeta1,
          kBetaHalfNeg,
          OverlapDistribution::power_tail(3.0),
          OverlapDistribution::scaled(0.7, kUniform),
          OverlapDistribution::scaled(1.0, kBeta1)};
}

}  // namespace

TEST(Sample, EmptyVector) {
  Rng rng = block_engine(1, 0);
  EXPECT_TRUE(sample(kUniform, 0, rng).empty());
}

TEST(Sample, UniformMean) {
  Rng rng = block_engine(2, 0);
  const auto v = sample(kUniform, 100000, rng);
  double sum = 0.0;
  for (double p : v.p) {
    ASSERT_GE(p, 0.0);
    ASSERT_LT(p, 1.0);
    sum += p;
  }
  EXPECT_NEAR(sum / 1e5, 0.5, 0.005);
}

TEST(Sample, PowerTailMean) {
  // m_1 = int 2(1 - x) x dx
  const double m1 = integrate([](double x) { return 2.0 * (1.0 - x) * x; }, 0.0, 1.0).value;
  EXPECT_NEAR(m1, 1.0 / 3.0, 1e-14);
  Rng rng = block_engine(3, 0);
  const auto v = sample(kBeta1, 100000, rng);
  double sum = 0.0;
  for (double p : v.p) sum += p;
  EXPECT_NEAR(sum / 1e5, m1, 0.005);
}

TEST(Sample, MatchesCdfWithinDkwBand) {
  // Dvoretzky-Kiefer-Wolfowitz: P(sup|F_n - F| > e) <= 2 exp(-2 n e^2); 99% level.
  const std::size_t n = 100000;
  const double band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
  std::uint64_t seed = 10;
  for (const auto& dist : families()) {
    Rng rng = block_engine(seed++, 0);
    auto v = sample(dist, n, rng).p;
    std::sort(v.begin(), v.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = dist.cdf(v[i]);
      d = std::max({d, std::fabs(f - static_cast<double>(i) / n),
                    std::fabs(f - static_cast<double>(i + 1) / n)});
    }
    EXPECT_LT(d, band) << dist.spec();
  }
}

TEST(Density, Examples) {
  EXPECT_DOUBLE_EQ(kUniform.density(0.3), 1.0);
  EXPECT_DOUBLE_EQ(kUniform.cdf(0.3), 0.3);
  EXPECT_NEAR(kBeta1.density(0.5), 1.0, 1e-15);
  EXPECT_NEAR(kBeta1.cdf(0.5), 0.75, 1e-15);
  const auto beta0 = OverlapDistribution::power_tail(0.0);
  for (double x = 0.0; x <= 1.0; x += 0.0625) {
    EXPECT_NEAR(beta0.density(x), kUniform.density(x), 1e-15);
    EXPECT_NEAR(beta0.cdf(x), kUniform.cdf(x), 1e-15);
  }
}

TEST(Density, OutsideUnitIntervalIsDomainError) {
  EXPECT_THROW(kUniform.density(-0.1), DomainError);
  EXPECT_THROW(kBeta1.cdf(1.5), DomainError);
}

TEST(Density, IntegratesToCdf) {
  // Quadrature in x cannot see the mass within one ulp of 1 (about 1e-8 for
  // beta = -0.5), so compare against the CDF short of the endpoint.
  for (const auto& dist : families()) {
    auto f = [&](double x) { return dist.density(x); };
    for (double frac : {0.5, 1.0 - 1e-8}) {
      const double b = dist.scale() * frac;
      const double mass = integrate_endpoint_singular(f, 0.0, b).value;
      EXPECT_NEAR(mass, dist.cdf(b), 1e-9) << dist.spec() << " b=" << b;
    }
  }
}

TEST(Density, CdfShape) {
  for (const auto& dist : families()) {
    EXPECT_EQ(dist.cdf(0.0), 0.0) << dist.spec();
    EXPECT_NEAR(dist.cdf(1.0), 1.0, 1e-15) << dist.spec();
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double c = dist.cdf(i / 1000.0);
      EXPECT_GE(c, prev) << dist.spec();
      prev = c;
    }
  }
}

TEST(Density, PowerTailLocalBehaviour) {
  for (double beta : {-0.5, 1.0, 3.0}) {
    const auto d = OverlapDistribution::power_tail(beta);
    const double x = 1e-9;
    EXPECT_NEAR(d.density(1.0 - x) / std::pow(x, beta), 1.0 + beta, 1e-5 * (1.0 + beta));
  }
}

TEST(Moment, Examples) {
  EXPECT_NEAR(kUniform.moment(2), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(kBeta1.moment(1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(kBeta1.moment(3), 0.1, 1e-15);
  for (long long k = 1; k <= 200; ++k) {
    EXPECT_NEAR(kBeta1.moment(k), 2.0 / ((k + 1.0) * (k + 2.0)), 1e-15 / (k * k));
  }
}

TEST(Moment, ClosedFormAgreesWithQuadrature) {
  for (const auto& dist : families()) {
    for (long long k : {1, 2, 5, 17, 50, 100}) {
      // Quadrature up to scale * (1 - h); on the last stretch x^k lies within
      // k h of scale^k, so it contributes its mass times scale^k (1 - k h / 2).
      const double h = 1e-10;
      const double b = dist.scale() * (1.0 - h);
      auto f = [&](double x) { return dist.density(x) * std::pow(x, static_cast<double>(k)); };
      const double body = integrate_endpoint_singular(f, 0.0, b, 1e-14).value;
      const double tail_mass = 1.0 - dist.cdf(b);
      const double q =
          body + tail_mass * std::pow(dist.scale(), static_cast<double>(k)) * (1.0 - 0.5 * k * h);
      EXPECT_NEAR(dist.moment(k), q, 1e-10 * std::max(1.0, q)) << dist.spec() << " k=" << k;
    }
  }
}

TEST(Moment, MonotoneAndLogConvex) {
  for (const auto& dist : families()) {
    double prev = dist.moment(1);
    for (long long k = 2; k <= 10000; ++k) {
      const double m = dist.moment(k);
      ASSERT_LE(m, prev) << dist.spec() << " k=" << k;
      prev = m;
    }
    for (long long k = 2; k <= 2000; ++k) {
      const double a = dist.moment(k - 1), b = dist.moment(k), c = dist.moment(k + 1);
      ASSERT_LE(b * b, a * c * (1.0 + 1e-13)) << dist.spec() << " k=" << k;
    }
  }
}

TEST(Moment, InterpolationMatchesIntegers) {
  for (const auto& dist : families()) {
    for (long long k = 1; k <= 40; ++k) {
      EXPECT_NEAR(dist.moment_at(static_cast<double>(k)), dist.moment(k),
                  1e-14 * dist.moment(k));
    }
  }
}

TEST(Moment, NonPositiveOrderRejected) { EXPECT_THROW(kUniform.moment(0), DomainError); }

TEST(TailParameters, Exponents) {
  EXPECT_DOUBLE_EQ(tail_parameters(kUniform).alpha, 1.0);
  EXPECT_DOUBLE_EQ(tail_parameters(kBeta1).alpha, 2.0);
  EXPECT_DOUBLE_EQ(tail_parameters(kBetaHalfNeg).alpha, 0.5);
  EXPECT_DOUBLE_EQ(kBeta1.convergence_exponent(), 2.0);
}

TEST(TailParameters, ConstantMatchesMomentRatio) {
  for (const auto& dist : families()) {
    if (!dist.has_power_tail()) continue;
    const auto t = dist.tail_parameters();
    const double at3 = dist.moment(1000) * std::pow(1000.0, t.alpha);
    const double at4 = dist.moment(10000) * std::pow(10000.0, t.alpha);
    EXPECT_NEAR(at3 / at4, 1.0, 0.02) << dist.spec();
    EXPECT_NEAR(at4 / t.moment_constant, 1.0, 0.02) << dist.spec();
    EXPECT_NEAR(t.moment_constant, t.density_constant * std::tgamma(t.beta + 1.0), 1e-12);
  }
}

TEST(TailParameters, BoundedSupportHasNoPowerTail) {
  const auto d = OverlapDistribution::scaled(0.5, kBeta1);
  EXPECT_FALSE(d.has_power_tail());
  EXPECT_THROW(d.tail_parameters(), NoPowerTailError);
  EXPECT_TRUE(std::isinf(d.convergence_exponent()));
  // moments decay geometrically
  EXPECT_NEAR(d.moment(10), std::pow(0.5, 10) * kBeta1.moment(10), 1e-18);
}

TEST(Construction, RejectsBadParameters) {
  EXPECT_THROW(OverlapDistribution::power_tail(-1.0), DomainError);
  EXPECT_THROW(OverlapDistribution::power_tail(std::nan("")), DomainError);
  EXPECT_THROW(OverlapDistribution::scaled(0.0, kUniform), DomainError);
  EXPECT_THROW(OverlapDistribution::scaled(1.5, kUniform), DomainError);
}

TEST(Spec, RoundTrip) {
  for (const auto& dist : families()) {
    EXPECT_EQ(OverlapDistribution::parse(dist.spec()), dist) << dist.spec();
  }
  EXPECT_EQ(OverlapDistribution::parse("powertail:beta=1"), kBeta1);
  EXPECT_EQ(OverlapDistribution::parse("scaled:a=0.5,inner=powertail:beta=2").spec(),
            "scaled:a=0.5,inner=powertail:beta=2");
  EXPECT_THROW(OverlapDistribution::parse("gauss"), ConfigError);
  EXPECT_THROW(OverlapDistribution::parse("powertail:beta=x"), ConfigError);
  EXPECT_THROW(OverlapDistribution::parse("powertail:beta=-2"), DomainError);
}

TEST(Gap, InverseTransformConsistentWithCdf) {
  for (const auto& dist : families()) {
    for (double v : {1e-9, 0.01, 0.3, 0.7, 1.0}) {
      const double g = dist.gap_from_uniform(v);
      // P(1 - X <= g) = 1 - F(1 - g) = v, checkable only while 1 - g != 1.
      if (g < 1e-6) {
        const auto tp = dist.tail_parameters();
        // f(1 - x) = c x^beta near 1, so P(1 - X <= g) = c g^(beta + 1) / (beta + 1).
        const double tail = tp.density_constant * std::pow(g, tp.alpha) / tp.alpha;
        EXPECT_NEAR(tail, v, 1e-9 * v) << dist.spec() << " v=" << v;
        continue;
      }
      EXPECT_NEAR(1.0 - dist.cdf(1.0 - g), v, 1e-12) << dist.spec() << " v=" << v;
    }
  }
}

TEST(ParseFloatList, Basics) {
  EXPECT_EQ(parse_float_list("0.5,0.25"), (std::vector<double>{0.5, 0.25}));
  EXPECT_TRUE(parse_float_list("").empty());
  EXPECT_THROW(parse_float_list("0.5,,1"), ConfigError);
  EXPECT_THROW(parse_float_list("abc"), ConfigError);
}
