#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <stdexcept>
#include <vector>

#include "batchlearn/random.hpp"

using namespace batchlearn;

namespace {

std::vector<double> draw_all(std::uint64_t seed, std::size_t trials, unsigned threads) {
  std::vector<double> out(trials);
  for_each_trial_block(seed, trials, threads, [&](Rng& rng, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = uniform01(rng);
  });
  return out;
}

}  // namespace

TEST(Random, TrialValuesDoNotDependOnThreadCount) {
  const auto one = draw_all(42, 10000, 1);
  EXPECT_EQ(one, draw_all(42, 10000, 2));
  EXPECT_EQ(one, draw_all(42, 10000, 7));
  EXPECT_NE(one, draw_all(43, 10000, 1));
}

TEST(Random, EveryTrialVisitedOnce) {
  std::vector<std::atomic<int>> hits(5000);
  for_each_trial_block(1, hits.size(), 3, [&](Rng&, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) hits[i]++;
  });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Random, ZeroTrialsRunsNothing) {
  bool called = false;
  for_each_trial_block(1, 0, 2, [&](Rng&, std::size_t, std::size_t) { called = true; });
  EXPECT_FALSE(called);
}

TEST(Random, ExceptionsPropagate) {
  EXPECT_THROW(for_each_trial_block(1, 5000, 2,
                                    [](Rng&, std::size_t begin, std::size_t) {
                                      if (begin >= kTrialBlockSize) throw std::runtime_error("x");
                                    }),
               std::runtime_error);
}

TEST(Random, DerivedSeedsDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master = 0; master < 20; ++master) {
    for (std::uint64_t stream = 0; stream < 50; ++stream) seen.insert(derive_seed(master, stream));
  }
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Random, UniformRanges) {
  Rng rng = block_engine(7, 0);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    const double v = uniform_open01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += u;
  }
  // sd of the mean = 1/sqrt(12 * 1e5) ~ 9.1e-4
  EXPECT_NEAR(sum / 100000.0, 0.5, 4 * 9.2e-4);
}

TEST(Random, ResolveThreads) {
  EXPECT_GE(resolve_threads(0), 1u);
  EXPECT_EQ(resolve_threads(3), 3u);
}
