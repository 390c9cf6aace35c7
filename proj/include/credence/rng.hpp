#pragma once

#include <cstdint>
#include <random>

namespace credence {

// SplitMix64 finalizer. Decorrelates nearby integer seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Key for substream `stream` of a master seed. Used wherever one logical seed
// drives many independent generators: bead chunks, study runs, per-generation
// resampling. substream(s, a) == substream(s, b) only if a == b.
constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

using Engine = std::mt19937_64;

inline Engine engine_for(std::uint64_t seed) { return Engine(mix64(seed)); }

inline Engine engine_for(std::uint64_t seed, std::uint64_t stream) {
  return Engine(substream(seed, stream));
}

// Uniform double in [0, 1) from the top 53 bits. Spelled out rather than
// using std::uniform_real_distribution so byte-level output does not depend
// on standard-library distribution internals.
inline double canonical(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace credence
