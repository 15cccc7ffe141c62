#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace toolsim {

// Deterministic PRNG used everywhere corpora must be byte-reproducible.
// Algorithm: splitmix64 (Steele, Lea, Flood 2014). The implementation is
// fixed here so that identical seeds produce identical streams on every
// platform and compiler; std::mt19937 distributions are not portable.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Modulo bias is below 2^-53 for every n used here.
  uint64_t below(uint64_t n) { return next_u64() % n; }

  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return next_double() < p; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

// Stable combiner for deriving shard / instance seeds from a master seed.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  Rng r(a ^ (b * 0xff51afd7ed558ccdULL) ^ 0x2545f4914f6cdd1dULL);
  return r.next_u64();
}

// 64-bit FNV-1a, the documented digest for state hashing and config hashes.
inline uint64_t fnv1a64(const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace toolsim
