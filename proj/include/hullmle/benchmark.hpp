#pragma once

// Uniform-cube hull experiment: n points in [0,1]^d, test point the all-ones
// corner, both centered by the sample mean.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "hullmle/hull.hpp"
#include "hullmle/numerics.hpp"
#include "hullmle/random.hpp"

namespace hullmle {

inline Matrix uniform_cube(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0 || d == 0) throw std::invalid_argument("uniform_cube: n and d must be positive");
  Rng rng(seed);
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.uniform();
  return m;
}

struct CubeTrial {
  std::uint64_t seed;
  HullVerdict verdict;
  double seconds;  // query time, excluding generation
};

/// Seed of trial i under a master seed; trials are independent.
inline std::uint64_t cube_trial_seed(std::uint64_t master, std::size_t trial) { return derive_seed(master, trial); }

inline CubeTrial cube_corner_trial(std::size_t n, std::size_t d, std::uint64_t seed, const SolverConfig& cfg = {}) {
  const TargetSet t = make_target_set(uniform_cube(n, d, seed));
  const auto start = std::chrono::steady_clock::now();
  HullVerdict v = query(t, Vector(d, 1.0), cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {seed, std::move(v), secs};
}

}  // namespace hullmle
