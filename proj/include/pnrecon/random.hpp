#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace pnrecon {

/// Seeded 64-bit Mersenne twister with portable uniform and normal draws.
/// The standard distribution objects are implementation-defined, so the
/// transforms live here to keep sequences identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal by Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double exponential() { return -std::log(uniform_open()); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniform draw from the probability simplex in `dimension` coordinates
/// (normalized exponential spacings). Every entry is strictly positive.
inline Eigen::VectorXd uniform_simplex(Eigen::Index dimension, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(dimension);
  for (Eigen::Index i = 0; i < dimension; ++i) v[i] = rng.exponential();
  return v / v.sum();
}

}  // namespace pnrecon
