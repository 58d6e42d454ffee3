#pragma once

#include <cstdint>

namespace fairround {

// Counter-based generator with cheap stream derivation (splitmix64 mixing).
// Substreams are addressed by mixing path components into the key, so
// Monte Carlo trials draw from disjoint streams whose output does not
// depend on evaluation order or thread count.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(mix(seed ^ 0x6a09e667f3bcc909ull)) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1].
  double uniform_oc() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n is tiny here; modulo bias is negligible.
  uint64_t below(uint64_t n) { return next_u64() % n; }

  bool coin(double p) { return uniform() < p; }

  // Derives an independent child stream addressed by up to four indices.
  Rng split(uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) const {
    uint64_t k = state_;
    k = mix(k ^ mix(a + 0x9e3779b97f4a7c15ull));
    k = mix(k ^ mix(b + 0xbf58476d1ce4e5b9ull));
    k = mix(k ^ mix(c + 0x94d049bb133111ebull));
    k = mix(k ^ mix(d + 0xd6e8feb86659fd93ull));
    Rng r(0);
    r.state_ = k;
    return r;
  }

  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

 private:
  uint64_t state_;
};

}  // namespace fairround
