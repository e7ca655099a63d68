#pragma once

// Seedable random source. std::mt19937_64 produces the same sequence on
// every conforming platform; the distribution mappings are hand-rolled
// because the standard <random> distributions are implementation-defined
// and would break run-to-run reproducibility across toolchains.

#include <cstdint>
#include <random>
#include <stdexcept>

namespace mcpr {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform integer in [lo, hi], both inclusive, via rejection sampling.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
    std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % span;
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % span);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mcpr
