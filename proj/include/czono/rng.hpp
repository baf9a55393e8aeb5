#pragma once

#include <cstdint>
#include <random>

namespace czono {

// Deterministic uniform double source: raw mt19937_64 output mapped onto
// [0, 1) with the fixed 53-bit ladder, so streams are reproducible across
// platforms and library versions (no std::uniform_real_distribution).
class UniformRng {
public:
  explicit UniformRng(std::uint64_t seed) : eng_(seed) {}

  double next() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double in(double lo, double hi) { return lo + (hi - lo) * next(); }

private:
  std::mt19937_64 eng_;
};

}  // namespace czono
