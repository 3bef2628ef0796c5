#pragma once

#include <cstdint>
#include <random>

namespace wcl {

/// Deterministic random source. All randomized corpora and generators draw
/// through this wrapper so identical seeds give identical bytes in reports.
struct Rng {
  std::mt19937_64 gen;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double u01() {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen() % n); }

  int sign() { return (gen() & 1) ? 1 : -1; }
};

}  // namespace wcl
