#pragma once

#include <cstdint>

namespace vri {

// xoshiro256++ (Blackman & Vigna), seeded through splitmix64. Fixed,
// portable algorithm so seeded runs reproduce bit-exactly everywhere;
// std::mt19937 distributions are implementation-defined and are not used.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed);

  std::uint64_t next();

  // Uniform on (0, 1]: never 0, so it is safe under log().
  double uniform01();

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t s_[4];
};

// Standard normal deviates via the Box-Muller transform; consumes two
// uniforms per pair and caches the second value.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next();

 private:
  Xoshiro256pp rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vri
