#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace batchlearn {

using Rng = std::mt19937_64;

// Trials are grouped into fixed-size blocks; every block owns an engine seeded
// from (master seed, stream, block index). Results therefore depend only on the
// master seed and trial index, never on how blocks are assigned to threads.
inline constexpr std::size_t kTrialBlockSize = 1024;

// SplitMix64 finalizer; used only to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

// Seed for an independent sub-stream, e.g. one per algorithm or per sweep point.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

// Engine for block `block` of the stream identified by `seed`.
Rng block_engine(std::uint64_t seed, std::uint64_t block);

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1); safe to take logarithms of.
inline double uniform_open01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Runs body(block_engine, begin, end) over [0, trials) in blocks of
// kTrialBlockSize. threads == 0 means hardware concurrency.
void for_each_trial_block(
    std::uint64_t seed, std::size_t trials, unsigned threads,
    const std::function<void(Rng&, std::size_t, std::size_t)>& body);

// Resolves a user thread count (0 = hardware concurrency, at least 1).
unsigned resolve_threads(unsigned requested) noexcept;

}  // namespace batchlearn
