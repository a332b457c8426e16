#include "batchlearn/simulators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "batchlearn/errors.hpp"
#include "batchlearn/numerics.hpp"

namespace batchlearn {
namespace {

constexpr std::size_t kMinNDeltaTrials = 1000;
constexpr double kSaturated = 9.0e18;

void check_overlaps(std::span<const double> p, bool allow_one) {
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("overlap outside [0, 1]");
    if (x == 1.0 && !allow_one) {
      throw DivergenceError("an overlap equal to 1 is never ruled out");
    }
  }
}

// Words until a concept with overlap p is contradicted: Geometric(1 - p) on
// {1, 2, ...}, by inversion. Saturates near INT64_MAX.
std::int64_t geometric_steps(double p, Rng& rng) {
  if (p == 0.0) return 1;
  if (p >= 1.0) return kCensored;
  const double r = std::ceil(std::log(uniform_open01(rng)) / std::log(p));
  if (!(r < kSaturated)) return static_cast<std::int64_t>(kSaturated);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(r));
}

std::size_t uniform_index(std::size_t count, Rng& rng) {
  const auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(count));
  return std::min(i, count - 1);
}

}  // namespace

std::string_view to_string(Algorithm alg) noexcept {
  switch (alg) {
    case Algorithm::Batch:
      return "batch";
    case Algorithm::Memoryless:
      return "memoryless";
    case Algorithm::FullMemory:
      return "full_memory";
  }
  return "";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::Batch, Algorithm::Memoryless, Algorithm::FullMemory}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (batch, memoryless, full_memory)");
}

std::string_view to_string(RepickPolicy policy) noexcept {
  return policy == RepickPolicy::AllConcepts ? "all" : "exclude_rejected";
}

RepickPolicy parse_repick_policy(std::string_view name) {
  if (name == "all") return RepickPolicy::AllConcepts;
  if (name == "exclude_rejected") return RepickPolicy::ExcludeRejected;
  throw ConfigError("unknown re-pick policy '" + std::string(name) +
                    "' (all, exclude_rejected)");
}

std::int64_t simulate_batch(std::span<const double> p, Rng& rng) {
  check_overlaps(p, false);
  if (p.empty()) return 0;
  // max_i ceil(r_i) = ceil(max_i r_i)
  double worst = 0.0;
  for (double x : p) {
    if (x == 0.0) continue;
    worst = std::max(worst, std::log(uniform_open01(rng)) / std::log(x));
  }
  const double r = std::ceil(worst);
  if (!(r < kSaturated)) return static_cast<std::int64_t>(kSaturated);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(r));
}

std::int64_t simulate_batch_wordwise(std::span<const double> p, Rng& rng) {
  check_overlaps(p, false);
  if (p.empty()) return 0;
  std::vector<char> alive(p.size(), 1);
  std::size_t remaining = p.size();
  for (std::int64_t k = 1;; ++k) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (alive[i] && !(uniform01(rng) < p[i])) {
        alive[i] = 0;
        --remaining;
      }
    }
    if (remaining == 0) return k;
  }
}

std::int64_t simulate_memoryless(std::span<const double> p, Rng& rng, std::int64_t horizon,
                                 RepickPolicy policy) {
  if (horizon < 1) throw DomainError("horizon must be >= 1");
  check_overlaps(p, true);
  const std::size_t n = p.size();
  if (n == 0) return 0;

  std::size_t held = uniform_index(n + 1, rng);
  std::int64_t t = 0;
  while (held != 0) {
    const std::int64_t hold = geometric_steps(p[held - 1], rng);
    if (hold > horizon - t) return kCensored;
    t += hold;
    if (policy == RepickPolicy::AllConcepts) {
      held = uniform_index(n + 1, rng);
    } else {
      // uniform over {0..n} without the concept just rejected
      const std::size_t j = uniform_index(n, rng);
      held = j < held ? j : j + 1;
    }
  }
  return t;
}

std::int64_t simulate_full_memory(std::span<const double> p, Rng& rng) {
  check_overlaps(p, false);
  const std::size_t n = p.size();
  if (n == 0) return 0;
  std::vector<std::size_t> open(n + 1);
  std::iota(open.begin(), open.end(), std::size_t{0});

  std::int64_t t = 0;
  for (;;) {
    const std::size_t slot = uniform_index(open.size(), rng);
    const std::size_t held = open[slot];
    if (held == 0) return t;
    const std::int64_t hold = geometric_steps(p[held - 1], rng);
    t = (hold > static_cast<std::int64_t>(kSaturated) - t) ? static_cast<std::int64_t>(kSaturated)
                                                          : t + hold;
    open[slot] = open.back();
    open.pop_back();
  }
}

double TrialBatch::mean() const {
  CompensatedSum sum;
  std::size_t count = 0;
  for (auto t : times) {
    if (t == kCensored) continue;
    sum += static_cast<double>(t);
    ++count;
  }
  return count ? sum.value() / static_cast<double>(count) : 0.0;
}

double TrialBatch::stderr_mean() const {
  const double m = mean();
  CompensatedSum sq;
  std::size_t count = 0;
  for (auto t : times) {
    if (t == kCensored) continue;
    const double d = static_cast<double>(t) - m;
    sq += d * d;
    ++count;
  }
  if (count < 2) return 0.0;
  return std::sqrt(sq.value() / static_cast<double>(count - 1) / static_cast<double>(count));
}

std::int64_t TrialBatch::quantile_time(double delta) const {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (times.empty()) throw DomainError("quantile of an empty trial batch");
  std::vector<std::int64_t> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  auto rank = static_cast<std::ptrdiff_t>(std::ceil((1.0 - delta) * m)) - 1;
  rank = std::clamp<std::ptrdiff_t>(rank, 0, static_cast<std::ptrdiff_t>(sorted.size()) - 1);
  return sorted[static_cast<std::size_t>(rank)];
}

TrialBatch run_trials(const TrialConfig& config) {
  if (config.trials == 0) throw DomainError("need at least one trial");
  if (config.fixed_p) {
    check_overlaps(*config.fixed_p, config.algorithm == Algorithm::Memoryless);
  }
  const std::size_t n = config.fixed_p ? config.fixed_p->size() : config.n;

  TrialBatch batch{config.algorithm, n, std::vector<std::int64_t>(config.trials), config.seed,
                   config.dist.spec(), !config.fixed_p.has_value(), 0};
  for_each_trial_block(
      config.seed, config.trials, config.threads,
      [&](Rng& rng, std::size_t begin, std::size_t end) {
        OverlapVector fresh;
        for (std::size_t t = begin; t < end; ++t) {
          std::span<const double> p;
          if (config.fixed_p) {
            p = *config.fixed_p;
          } else {
            fresh = sample(config.dist, n, rng);
            p = fresh.p;
          }
          switch (config.algorithm) {
            case Algorithm::Batch:
              batch.times[t] = simulate_batch(p, rng);
              break;
            case Algorithm::Memoryless:
              batch.times[t] = simulate_memoryless(p, rng, config.horizon, config.policy);
              break;
            case Algorithm::FullMemory:
              batch.times[t] = simulate_full_memory(p, rng);
              break;
          }
        }
      });
  batch.censored = static_cast<std::size_t>(
      std::count(batch.times.begin(), batch.times.end(), kCensored));
  return batch;
}

std::int64_t empirical_n_delta(const TrialBatch& batch, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  const double censored_fraction =
      static_cast<double>(batch.censored) / static_cast<double>(batch.times.size());
  if (censored_fraction > delta / 2.0) {
    throw CensoringError(std::to_string(batch.censored) + " of " +
                         std::to_string(batch.times.size()) +
                         " trials censored, more than delta/2; raise the horizon");
  }
  return batch.quantile_time(delta);
}

std::int64_t empirical_n_delta(Algorithm algorithm, const OverlapDistribution& dist,
                               std::size_t n, double delta, std::size_t trials,
                               std::uint64_t seed, unsigned threads, std::int64_t horizon,
                               RepickPolicy policy) {
  if (trials < kMinNDeltaTrials) throw DomainError("empirical N_delta needs >= 1000 trials");
  TrialConfig config;
  config.algorithm = algorithm;
  config.dist = dist;
  config.n = n;
  config.trials = trials;
  config.seed = seed;
  config.horizon = horizon;
  config.policy = policy;
  config.threads = threads;
  return empirical_n_delta(run_trials(config), delta);
}

}  // namespace batchlearn
