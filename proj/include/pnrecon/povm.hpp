#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "pnrecon/fock_kernel.hpp"

namespace pnrecon {

class PhotonDistribution;

inline constexpr double kDefaultThreshold = 0.99;

/// Trusted Fock subspace: levels 0..n_edge-1 all have R(n) >= threshold.
struct SubspaceSelection {
  std::size_t n_edge = 0;
  double threshold = kDefaultThreshold;
  Eigen::VectorXd r_values;
};

/// R(n) = sum_i h(i, n), recomputed from the matrix.
Eigen::VectorXd identity_diagonal(const ResponseKernel& kernel);

/// n_edge is the first level with R(n) < tau, or R.size() if there is none.
SubspaceSelection select_subspace(const Eigen::VectorXd& r, double tau);

/// Bin probabilities q_i = sum_n h(i, n) p_n predicted by `p`.
Eigen::VectorXd refit(const ResponseKernel& kernel, const PhotonDistribution& p);
Eigen::VectorXd refit(const ResponseKernel& kernel, const Eigen::VectorXd& p);

}  // namespace pnrecon
