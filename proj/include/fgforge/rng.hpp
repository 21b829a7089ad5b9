// Deterministic RNG with explicit integer-to-double mapping, so seeded
// output is identical across platforms and standard libraries.
#pragma once

#include <cstdint>

namespace fgforge {

// splitmix64: tiny, well-mixed, and fully specified by the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double unit() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // Uniform in [-1, 1).
  double sym() { return 2.0 * unit() - 1.0; }

  // Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(u64() % span);
  }

 private:
  std::uint64_t state_;
};

}  // namespace fgforge
