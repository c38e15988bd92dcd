#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qng {

// Seeded generator with a pinned output derivation, so that a seed written in
// a scenario file produces the same placements, edges and signals everywhere.
// The raw stream is std::mt19937_64 (bit-exact by the standard); uniform and
// normal deviates are derived with fixed formulas instead of the unspecified
// std::*_distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1): top 53 bits of one 64-bit draw.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes two uniforms per deviate.
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qng
