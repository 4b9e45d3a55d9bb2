#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace msi {

// Deterministic 64-bit generator (splitmix64, Vigna). Output sequence is
// fixed by the seed alone, independent of platform or standard library,
// which is what the byte-identical reproducibility contract needs.
// std::mt19937 would pin the engine but not the distributions.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n). Rejection-free multiply-shift is biased for
  // huge n; n here is always far below 2^32 so the bias is irrelevant, but
  // use rejection anyway to keep the sequence exactly uniform.
  uint64_t next_below(uint64_t n) {
    if (n == 0) return 0;
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Standard normal via polar Box-Muller (no cached spare: determinism over speed).
  double normal() {
    for (;;) {
      double u = 2.0 * next_double() - 1.0;
      double v = 2.0 * next_double() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  double exponential() { return -std::log(1.0 - next_double()); }

  // Knuth product-of-uniforms, chunked so exp(-lambda) never underflows.
  uint64_t poisson(double lambda) {
    uint64_t count = 0;
    while (lambda > 30.0) {
      count += poisson_small(30.0);
      lambda -= 30.0;
    }
    return count + poisson_small(lambda);
  }

  // Derive an independent stream, e.g. one per bootstrap replicate.
  static uint64_t mix(uint64_t seed, uint64_t stream) {
    Rng r(seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
    return r.next_u64();
  }

private:
  uint64_t poisson_small(double lambda) {
    const double limit = std::exp(-lambda);
    uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= next_double();
    } while (p > limit);
    return k - 1;
  }

  uint64_t state_;
};

// Sorted sample of n iid uniform(0,1) order statistics in O(n) via the
// normalized-cumulative-exponentials construction.
inline std::vector<double> sorted_uniform_sample(Rng& rng, size_t n) {
  std::vector<double> out(n);
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    acc += rng.exponential();
    out[i] = acc;
  }
  acc += rng.exponential();
  const double inv = 1.0 / acc;
  for (double& v : out) v *= inv;
  return out;
}

}  // namespace msi
