#pragma once

// Number-basis diagonal of the binned, phase-averaged homodyne POVM.
//
// Quadrature convention: x = (a + a^dagger)/sqrt(2), so the vacuum density is
// pi^{-1/2} exp(-x^2) and its variance is 1/2. Every sampler and kernel in the
// library shares this convention.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pnrecon {

/// Largest Fock level / Hermite order the library evaluates.
inline constexpr int kMaxOrder = 200;
/// Largest kernel dimension (levels 0..kMaxDimension-1).
inline constexpr std::size_t kMaxDimension = 200;

/// Uniform binning of the quadrature axis. Bins are half-open,
/// [center - width/2, center + width/2).
class OscillatorGrid {
 public:
  OscillatorGrid() = default;

  /// Bins tiling [lower, upper] with spacing `width`. The span must be an
  /// integer number of bins (within 1e-9 of a bin).
  static OscillatorGrid from_range(double lower, double upper, double width);

  /// Rebuilds a grid from explicit centers, checking uniform spacing.
  static OscillatorGrid from_centers(std::vector<double> centers, double width);

  const std::vector<double>& centers() const { return centers_; }
  double width() const { return width_; }
  std::size_t size() const { return centers_.size(); }
  double lower_edge() const { return centers_.front() - 0.5 * width_; }
  double upper_edge() const { return centers_.back() + 0.5 * width_; }

  /// Grid made of rows [first, first+count).
  OscillatorGrid slice(std::size_t first, std::size_t count) const;

 private:
  OscillatorGrid(std::vector<double> centers, double width)
      : centers_(std::move(centers)), width_(width) {}

  std::vector<double> centers_;
  double width_ = 0.0;
};

/// M x D matrix of bin probabilities h(i, n) = Tr(Pi(x_i) |n><n|).
struct ResponseKernel {
  Eigen::MatrixXd h;
  OscillatorGrid grid;
  double efficiency = 1.0;
  /// Column sums R(n), the diagonal of sum_i Pi(x_i).
  Eigen::VectorXd identity_diag;

  std::size_t dimension() const { return static_cast<std::size_t>(h.cols()); }
  std::size_t bins() const { return static_cast<std::size_t>(h.rows()); }

  /// Kernel restricted to levels 0..levels-1.
  ResponseKernel leading(std::size_t levels) const;
};

/// Phi_k(x) = psi_k(x)^2 for the normalized oscillator eigenfunction psi_k.
double oscillator_pdf(int k, double x);

/// Writes Phi_0(x) .. Phi_{out.size()-1}(x) in one recurrence pass.
void oscillator_pdf_row(double x, std::span<double> out);

/// Binomial survival weights C(n,k) eta^k (1-eta)^(n-k), k = 0..n.
std::vector<double> binomial_loss_weights(int n, double eta);

ResponseKernel build_kernel(const OscillatorGrid& grid, double eta,
                            std::size_t dimension);

}  // namespace pnrecon
