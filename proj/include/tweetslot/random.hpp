#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace tweetslot {

// All randomness goes through std::mt19937_64, whose output sequence is fixed
// by the standard. Distributions are derived by hand below because the
// standard library distributions are implementation-defined.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [-scale, scale).
inline double uniform_symmetric(Rng& rng, double scale) {
  return (2.0 * uniform01(rng) - 1.0) * scale;
}

// Fisher-Yates, descending: for i = n-1 .. 1 draw j = rng() mod (i+1) and
// swap items i and j.
template <typename T>
void seeded_shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace tweetslot
