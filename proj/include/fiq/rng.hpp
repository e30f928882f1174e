#pragma once

#include <cmath>
#include <cstdint>

// Deterministic random number utilities. Everything here is explicit and
// platform-independent so that runs are reproducible bit-for-bit: std::
// distributions are implementation-defined and must not appear in any
// simulation path.

namespace fiq {

// SplitMix64 step, also used as a stateless mixing function.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless hash of (seed, a, b): the seed-splitting function used to derive
// replica seeds and counter-based sample draws.
inline uint64_t hash_u64(uint64_t seed, uint64_t a, uint64_t b = 0) {
  uint64_t s = seed;
  uint64_t h = splitmix64(s);
  s ^= a * 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s ^= b * 0xd1b54a32d192ed03ULL;
  h ^= splitmix64(s);
  return h;
}

// xoshiro256++ (Blackman & Vigna), seeded through SplitMix64.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) {
    for (auto& w : s_) w = splitmix64(seed);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Multiply-shift bound; the tiny modulo bias
  // (< 2^-64 * n) is irrelevant at our n and keeps the draw branch-free.
  uint32_t next_below(uint32_t n) {
    return static_cast<uint32_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller on explicit uniforms.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Fisher-Yates shuffle of indices [0, n) stored in `perm`.
  template <typename Vec>
  void shuffle(Vec& perm) {
    for (uint32_t i = static_cast<uint32_t>(perm.size()); i > 1; --i) {
      uint32_t j = next_below(i);
      auto tmp = perm[i - 1];
      perm[i - 1] = perm[j];
      perm[j] = tmp;
    }
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Uniform double in [0,1) from a stateless counter draw.
inline double counter_uniform(uint64_t seed, uint64_t counter, uint64_t stream = 0) {
  return (hash_u64(seed, counter, stream) >> 11) * 0x1.0p-53;
}

}  // namespace fiq
