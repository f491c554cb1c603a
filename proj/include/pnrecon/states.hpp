#pragma once

// Synthetic ground-truth photon statistics and random-phase homodyne
// samplers with detector loss.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pnrecon/fock_kernel.hpp"

namespace pnrecon {

/// Nonnegative p_n on levels 0..D-1 summing to one.
class PhotonDistribution {
 public:
  PhotonDistribution() = default;

  /// Validates nonnegativity and |sum - 1| <= tolerance.
  explicit PhotonDistribution(Eigen::VectorXd p, double tolerance = 1e-9);

  /// Divides a nonnegative vector with positive sum by that sum.
  static PhotonDistribution normalized(Eigen::VectorXd raw);

  static PhotonDistribution fock(std::size_t level, std::size_t dimension);

  const Eigen::VectorXd& values() const { return p_; }
  std::size_t dimension() const { return static_cast<std::size_t>(p_.size()); }
  double operator[](std::size_t n) const { return p_[static_cast<Eigen::Index>(n)]; }
  double mean() const;

 private:
  Eigen::VectorXd p_;
};

/// Generators refuse truncations that drop more than this much probability.
inline constexpr double kMaxTailMass = 1e-9;

PhotonDistribution coherent_pn(double mean, std::size_t dimension);
PhotonDistribution squeezed_vacuum_pn(double squeeze, std::size_t dimension);
PhotonDistribution thermal_pn(double mean, std::size_t dimension);

/// Displaced, amplitude-squeezed state D(alpha) S(r)|0> with real alpha >= 0
/// and the x quadrature squeezed. Obtained numerically from the amplitude
/// recurrence cosh(r) sqrt(n+1) c_{n+1} = alpha e^r c_n - sinh(r) sqrt(n) c_{n-1}.
PhotonDistribution displaced_squeezed_pn(double displacement, double squeeze,
                                         std::size_t dimension);

/// Photon statistics after binomial loss with survival probability eta.
PhotonDistribution degrade(const PhotonDistribution& p, double eta);

/// Samples per RNG chunk; chunk c is seeded with seed + c.
inline constexpr std::size_t kSampleChunk = 1u << 16;

/// N independent random-phase quadratures of a state with photon statistics
/// `p`, seen through efficiency `eta`. Inverse-CDF sampling on a table with
/// step width/8 covering `hint` extended by six vacuum standard deviations.
std::vector<double> sample_quadratures(const PhotonDistribution& p, double eta,
                                       std::size_t n_samples, std::uint64_t seed,
                                       const OscillatorGrid& hint);

/// Direct Gaussian sampler for the displaced squeezed state: theta uniform,
/// then normal with mean sqrt(2 eta) alpha cos(theta) and variance
/// eta (e^{-2r} cos^2 + e^{2r} sin^2)/2 + (1 - eta)/2.
std::vector<double> sample_gaussian_quadratures(double displacement, double squeeze,
                                                double eta, std::size_t n_samples,
                                                std::uint64_t seed);

/// Binned quadrature data with frequencies f_i = counts_i / total.
struct QuadratureHistogram {
  OscillatorGrid grid;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  Eigen::VectorXd frequencies() const;
};

struct BinnedSamples {
  QuadratureHistogram histogram;
  std::uint64_t dropped = 0;
};

/// Half-open binning; samples outside [lower_edge, upper_edge) are dropped
/// and counted in `dropped`.
BinnedSamples make_histogram(const std::vector<double>& samples, const OscillatorGrid& grid);

}  // namespace pnrecon
