#ifndef REDBENCH_RNG_HPP
#define REDBENCH_RNG_HPP

#include <cstdint>
#include <random>

namespace redbench {

using Engine = std::mt19937_64;

// splitmix64 finalizer; decorrelates adjacent seeds before they reach the engine.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of an independent stream identified by (seed, index[, sub]).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t sub = 0) noexcept {
  return mix_seed(seed ^ mix_seed(index ^ mix_seed(sub + 0x5851f42d4c957f2dULL)));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t index, std::uint64_t sub = 0) {
  return Engine(derive_seed(seed, index, sub));
}

}  // namespace redbench

#endif  // REDBENCH_RNG_HPP
