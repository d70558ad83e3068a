#pragma once

#include <cstdint>

#include "ahls/linalg.hpp"

// All randomness in the library flows through these streams. SplitMix64 is
// used both as the mixer that derives independent stream seeds from the
// single config seed and as the per-stream generator, so results are
// bit-reproducible across platforms (no std::random distributions).

namespace ahls {

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derive a stream seed from (seed, stream id); streams with distinct ids are
// statistically independent for our purposes.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
  splitmix64_step(s);
  std::uint64_t t = s;
  return splitmix64_step(t);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : state_(derive_seed(seed, stream)) {}

  std::uint64_t next_u64() { return splitmix64_step(state_); }

  // uniform in [0,1) with 53 random bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // uniform point in the box [lo, hi]
  Vec uniform_box(const Vec& lo, const Vec& hi) {
    Vec x(lo.n);
    for (int i = 0; i < lo.n; ++i) x[i] = uniform(lo[i], hi[i]);
    return x;
  }

  // uniform direction on S^{n-1}
  Vec sphere_dir(int n) {
    Vec d(n);
    if (n == 1) {
      d[0] = (next_u64() & 1u) ? 1.0 : -1.0;
      return d;
    }
    if (n == 2) {
      double th = uniform(0.0, 6.283185307179586476925287);
      d[0] = std::cos(th);
      d[1] = std::sin(th);
      return d;
    }
    double u = uniform(-1.0, 1.0);
    double phi = uniform(0.0, 6.283185307179586476925287);
    double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    d[0] = s * std::cos(phi);
    d[1] = s * std::sin(phi);
    d[2] = u;
    return d;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ahls
