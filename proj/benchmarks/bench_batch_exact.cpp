#include <benchmark/benchmark.h>

#include <vector>

#include "batchlearn/batch_exact.hpp"
#include "batchlearn/distributions.hpp"
#include "batchlearn/random.hpp"

namespace {

std::vector<double> vector_of(const char* spec, std::size_t n, std::uint64_t seed) {
  batchlearn::Rng rng = batchlearn::block_engine(seed, 0);
  return batchlearn::sample(batchlearn::OverlapDistribution::parse(spec), n, rng).p;
}

void BM_Survival(benchmark::State& state) {
  const auto p = vector_of("uniform", static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(batchlearn::survival(p, 50));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Survival)->RangeMultiplier(10)->Range(10, 100000)->Complexity();

void BM_ExpectedTimeSeries(benchmark::State& state, const char* spec) {
  const auto p = vector_of(spec, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(batchlearn::expected_time_series(p));
}
BENCHMARK_CAPTURE(BM_ExpectedTimeSeries, uniform, "uniform")->RangeMultiplier(10)->Range(10, 10000);
BENCHMARK_CAPTURE(BM_ExpectedTimeSeries, beta1, "powertail:beta=1")
    ->RangeMultiplier(10)
    ->Range(10, 10000);
BENCHMARK_CAPTURE(BM_ExpectedTimeSeries, beta_neg_half, "powertail:beta=-0.5")
    ->RangeMultiplier(10)
    ->Range(10, 1000);

void BM_Subsets(benchmark::State& state) {
  const auto p = vector_of("uniform", static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(batchlearn::expected_time_subsets(p));
}
BENCHMARK(BM_Subsets)->DenseRange(5, 20, 5);

}  // namespace
