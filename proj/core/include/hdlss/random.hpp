#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <boost/random/mersenne_twister.hpp>

namespace hdlss {

using Seed = std::uint64_t;

/// Engine used everywhere. Boost's engine and distributions have fixed
/// algorithms, so a seed reproduces the same stream on every platform.
using Rng = boost::random::mt19937_64;

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Child seed for stream `index` of `seed`:
/// seed XOR (0x9E3779B97F4A7C15 * (index + 1)) with 64-bit wrap-around.
constexpr Seed derive_seed(Seed seed, std::uint64_t index) noexcept {
  return seed ^ (kGoldenGamma * (index + 1));
}

/// SplitMix64 finalizer. Bijective; used where two derived streams would
/// otherwise cancel under repeated XOR derivation.
constexpr Seed mix_seed(Seed z) noexcept {
  z += kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Uniform real in [0, 1).
double uniform_unit(Rng& rng);

double standard_normal(Rng& rng);

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

/// k distinct values from [0, n), returned in ascending order.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k);

/// n draws from [0, n) with replacement, in draw order.
std::vector<std::size_t> bootstrap_indices(Rng& rng, std::size_t n);

} // namespace hdlss
