// chapball - deterministic random helpers (fixed formulas, no
// implementation-defined distributions, so seeded runs are reproducible)
#ifndef CHAPBALL_RNG_HPP_
#define CHAPBALL_RNG_HPP_

#include <cmath>
#include <cstdint>

#include "chapball/types.hpp"

namespace chapball {

/// SplitMix64; passes through every 64-bit state exactly once.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  Vec normal_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Vec unit_vec(int n) {
    Vec v = normal_vec(n);
    while (v.norm() < 1e-6) v = normal_vec(n);
    return v / v.norm();
  }

  /// Random vector tangent to the sphere at base (Euclidean projection).
  Vec tangent_vec(const Vec& base) {
    Vec v = normal_vec(static_cast<int>(base.size()));
    v -= v.dot(base) * base;
    while (v.norm() < 1e-6) {
      v = normal_vec(static_cast<int>(base.size()));
      v -= v.dot(base) * base;
    }
    return v;
  }

 private:
  std::uint64_t state_;
};

}  // namespace chapball

#endif  // CHAPBALL_RNG_HPP_
