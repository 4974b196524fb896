#ifndef CONVOSCORE_RNG_HPP
#define CONVOSCORE_RNG_HPP

#include <cmath>
#include <cstdint>

namespace convoscore {

// SplitMix64 generator (Steele/Lea/Flood). Every random draw in the toolkit
// goes through this so that a fixed seed produces bit-identical fixtures on
// any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n).
  uint64_t next_below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  // Standard normal via Box-Muller. One value per call; the second value of
  // the pair is discarded to keep the stream position-independent.
  double normal() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925287 * u2);
  }

 private:
  uint64_t state_;
};

}  // namespace convoscore

#endif
