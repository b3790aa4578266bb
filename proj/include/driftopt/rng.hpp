#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace driftopt {

using Rng = std::mt19937_64;

/// Mixes `base` with each element of `path` through splitmix64. Substreams
/// derived from distinct paths are statistically independent, and the result
/// depends only on the values, never on call order elsewhere.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace driftopt
