#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Core>

namespace dppselect {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seedable generator with a portable output sequence.
///
/// The engine is mt19937_64, whose output is fixed by the standard. The
/// standard distributions are not, so uniforms and normals are derived here
/// directly from the raw 64-bit words.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(splitmix64(seed ^ splitmix64(stream))) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire-style rejection keeps the draw unbiased.
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /// Index drawn with probability proportional to `weights` (entries <= 0
  /// are never drawn). Returns -1 when every weight is non-positive.
  template <typename Derived>
  Eigen::Index categorical(const Eigen::DenseBase<Derived>& weights) noexcept {
    double total = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i)
      if (weights(i) > 0.0) total += weights(i);
    if (!(total > 0.0)) return -1;
    const double target = uniform() * total;
    double acc = 0.0;
    Eigen::Index last = -1;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      if (!(weights(i) > 0.0)) continue;
      acc += weights(i);
      last = i;
      if (target < acc) return i;
    }
    return last;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dppselect
