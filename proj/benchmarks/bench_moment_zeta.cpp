#include <benchmark/benchmark.h>

#include "batchlearn/distributions.hpp"
#include "batchlearn/ensemble.hpp"
#include "batchlearn/moment_zeta.hpp"

namespace {

void BM_Zeta(benchmark::State& state, const char* spec, double s) {
  const auto dist = batchlearn::OverlapDistribution::parse(spec);
  for (auto _ : state) benchmark::DoNotOptimize(batchlearn::zeta(dist, s).value);
}
BENCHMARK_CAPTURE(BM_Zeta, uniform_2, "uniform", 2.0);
BENCHMARK_CAPTURE(BM_Zeta, beta1_1, "powertail:beta=1", 1.0);
BENCHMARK_CAPTURE(BM_Zeta, beta1_0_6, "powertail:beta=1", 0.6);

void BM_MomentSeries(benchmark::State& state) {
  const auto dist = batchlearn::OverlapDistribution::power_tail(1.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(batchlearn::expected_time_moment_series(dist, n).value);
  }
}
BENCHMARK(BM_MomentSeries)->RangeMultiplier(10)->Range(100, 100000);

}  // namespace
