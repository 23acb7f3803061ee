#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace admmo {

// One stream per run; every stochastic operator takes it by reference.
using rng_type = std::mt19937_64;

inline rng_type make_rng(std::uint64_t seed) { return rng_type{seed}; }

inline std::size_t uniform_index(rng_type& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>{0, n - 1}(rng);
}

inline double uniform01(rng_type& rng) {
  return std::uniform_real_distribution<double>{0.0, 1.0}(rng);
}

inline bool bernoulli(rng_type& rng, double prob) { return uniform01(rng) < prob; }

}  // namespace admmo
