#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace uavsim {

/// Independent, reproducible RNG stream for (seed, purpose, index).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

/// Fixed stream ids so no two consumers share a sequence.
namespace streams {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kScenario = 2;
inline constexpr std::uint64_t kChannel = 3;
inline constexpr std::uint64_t kPolicy = 4;
inline constexpr std::uint64_t kReplay = 5;
inline constexpr std::uint64_t kEvalScenario = 6;
inline constexpr std::uint64_t kEvalChannel = 7;
inline constexpr std::uint64_t kGridSeed = 8;
}  // namespace streams

/// Worker count: UAVSIM_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_threads();

/// Runs fn(i) for i in [0, n) on up to worker_threads() threads. Each index
/// runs exactly once; the first exception is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace uavsim
