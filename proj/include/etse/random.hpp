#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "etse/linalg.hpp"

namespace etse {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a stream seed from a master seed and a path of stream
/// coordinates: h = mix64(master), then h = mix64(h ^ (c + golden)) for each
/// coordinate c. Distinct paths give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) noexcept;

/// Seeded 64-bit Mersenne Twister with the draws the simulator needs.
/// Not thread-safe; give each thread (or replica) its own instance.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) from the top 53 bits of one engine output.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double standard_normal() { return normal_(engine_); }

  Vector standard_normal(Eigen::Index dim);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace etse
