#pragma once

#include <cstdint>
#include <random>

namespace gdf {

using Rng = std::mt19937_64;

/// splitmix64; used to decorrelate derived seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Generator for substream `stream` of master seed `seed`. Workers own one
/// substream each; results are reduced in fixed stream order, so outputs do
/// not depend on the thread count.
inline Rng substream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(mix_seed(seed ^ mix_seed(stream)));
}

}  // namespace gdf
