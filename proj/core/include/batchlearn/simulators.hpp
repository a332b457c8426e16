#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "batchlearn/distributions.hpp"
#include "batchlearn/random.hpp"

namespace batchlearn {

enum class Algorithm { Batch, Memoryless, FullMemory };

std::string_view to_string(Algorithm alg) noexcept;
// Accepts batch, memoryless, full_memory.
Algorithm parse_algorithm(std::string_view name);

// How the memoryless learner re-picks after a contradiction.
enum class RepickPolicy {
  AllConcepts,      // uniform over all n + 1 concepts, including the one just rejected
  ExcludeRejected,  // uniform over the other n concepts
};

std::string_view to_string(RepickPolicy policy) noexcept;
RepickPolicy parse_repick_policy(std::string_view name);

// Marker for a memoryless run that had not settled by the horizon.
inline constexpr std::int64_t kCensored = std::numeric_limits<std::int64_t>::max();
inline constexpr std::int64_t kDefaultHorizon = 1'000'000;

// Batch learner: words until every wrong concept has been ruled out. Under
// independence this is the maximum over i of Geometric(1 - p_i) on {1, 2, ...}.
// Returns 0 for n = 0.
std::int64_t simulate_batch(std::span<const double> p, Rng& rng);

// Word-by-word reference: each word's concept list contains R_i with
// probability p_i; returns the first k with the intersection equal to {R_0}.
std::int64_t simulate_batch_wordwise(std::span<const double> p, Rng& rng);

// Memoryless learner. Returns the step of the last re-pick that lands on R_0
// (0 when the initial guess is R_0), or kCensored if that has not happened by
// `horizon` words.
std::int64_t simulate_memoryless(std::span<const double> p, Rng& rng,
                                 std::int64_t horizon = kDefaultHorizon,
                                 RepickPolicy policy = RepickPolicy::AllConcepts);

// Learner with full memory: re-picks are uniform over concepts not yet
// rejected. Always settles.
std::int64_t simulate_full_memory(std::span<const double> p, Rng& rng);

struct TrialConfig {
  Algorithm algorithm = Algorithm::Batch;
  OverlapDistribution dist = OverlapDistribution::uniform();
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  // When set, every trial uses this overlap vector instead of a fresh draw.
  std::optional<std::vector<double>> fixed_p;
  std::int64_t horizon = kDefaultHorizon;
  RepickPolicy policy = RepickPolicy::AllConcepts;
  unsigned threads = 1;
};

struct TrialBatch {
  Algorithm algorithm;
  std::size_t n;
  std::vector<std::int64_t> times;  // kCensored for censored trials
  std::uint64_t seed;
  std::string dist;                 // distribution spec
  bool resample_p;
  std::size_t censored;

  double mean() const;         // over uncensored trials
  double stderr_mean() const;  // over uncensored trials
  // Smallest k with empirical P(time <= k) >= 1 - delta; kCensored when the
  // quantile falls among censored trials.
  std::int64_t quantile_time(double delta) const;
};

// Runs the configured trials; results depend only on (config, seed).
TrialBatch run_trials(const TrialConfig& config);

// Empirical N_delta with a fresh overlap vector per trial. Throws
// CensoringError when more than delta/2 of the trials are censored.
std::int64_t empirical_n_delta(Algorithm algorithm, const OverlapDistribution& dist,
                               std::size_t n, double delta, std::size_t trials,
                               std::uint64_t seed, unsigned threads = 1,
                               std::int64_t horizon = kDefaultHorizon,
                               RepickPolicy policy = RepickPolicy::AllConcepts);

// Same, from an existing batch.
std::int64_t empirical_n_delta(const TrialBatch& batch, double delta);

}  // namespace batchlearn
