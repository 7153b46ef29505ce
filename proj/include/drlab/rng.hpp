#pragma once

#include <cstdint>

namespace drlab {

// SplitMix64; used to expand seeds and to derive substream seeds.
struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

// xoshiro256++ by Blackman and Vigna, state seeded through SplitMix64.
// Portable: the same seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    SplitMix64 sm{seed};
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

// Seed for substream `stream` of a master seed. Distinct streams are
// decorrelated by the SplitMix64 finalizer; derivation may be nested.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
  SplitMix64 sm{master ^ (0xD1B54A32D192ED03ULL * (stream + 1))};
  sm.next();
  return sm.next();
}

}  // namespace drlab
