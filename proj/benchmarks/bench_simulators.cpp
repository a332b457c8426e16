#include <benchmark/benchmark.h>

#include <vector>

#include "batchlearn/distributions.hpp"
#include "batchlearn/random.hpp"
#include "batchlearn/simulators.hpp"

namespace {

void BM_SimulateBatch(benchmark::State& state) {
  batchlearn::Rng rng = batchlearn::block_engine(4, 0);
  const auto p = batchlearn::sample(batchlearn::OverlapDistribution::uniform(),
                                    static_cast<std::size_t>(state.range(0)), rng)
                     .p;
  for (auto _ : state) benchmark::DoNotOptimize(batchlearn::simulate_batch(p, rng));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SimulateBatch)->RangeMultiplier(10)->Range(10, 100000)->Complexity();

void BM_SimulateMemoryless(benchmark::State& state) {
  batchlearn::Rng rng = batchlearn::block_engine(5, 0);
  const auto p = batchlearn::sample(batchlearn::OverlapDistribution::uniform(),
                                    static_cast<std::size_t>(state.range(0)), rng)
                     .p;
  for (auto _ : state) benchmark::DoNotOptimize(batchlearn::simulate_memoryless(p, rng));
}
BENCHMARK(BM_SimulateMemoryless)->RangeMultiplier(10)->Range(10, 1000);

void BM_RunTrials(benchmark::State& state) {
  batchlearn::TrialConfig config;
  config.n = 1000;
  config.trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    ++config.seed;
    benchmark::DoNotOptimize(batchlearn::run_trials(config).times.data());
  }
}
BENCHMARK(BM_RunTrials)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
