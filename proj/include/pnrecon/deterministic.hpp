#pragma once

// Linear-inversion baseline: truncated-SVD least squares on the trusted
// subspace, with no positivity constraint. Negative entries are kept; they
// are what the baseline is meant to show.

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "pnrecon/fock_kernel.hpp"

namespace pnrecon {

inline constexpr double kDefaultSingularCutoff = 1e-8;

struct DeterministicResult {
  /// Minimum-norm least-squares solution rescaled to unit sum; may be negative.
  Eigen::VectorXd estimate;
  /// Empty when the refit is nonpositive at some bin with f_i > 0.
  std::optional<double> relative_entropy;
  double data_entropy = 0.0;
  int negative_count = 0;
  Eigen::VectorXd refit;
  /// Singular values kept.
  int rank = 0;

  bool k_defined() const { return relative_entropy.has_value(); }
};

/// Solves H p ~ f over levels 0..n_edge-1, discarding singular values below
/// singular_cutoff * sigma_max, then divides by the (positive) sum.
DeterministicResult linear_invert(const ResponseKernel& kernel, const Eigen::VectorXd& frequencies,
                                  std::size_t n_edge,
                                  double singular_cutoff = kDefaultSingularCutoff);

}  // namespace pnrecon
