#pragma once

// Maximum-likelihood photon-number reconstruction by the multiplicative
// expectation-maximization fixed point
//
//   p_n  <-  p_n * g_n / R(n),   g_n = sum_i f_i h(i, n) / q_i,
//
// followed by renormalization. For commuting (number-diagonal) POVM elements
// this is the diagonal form of R(rho) rho = rho.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pnrecon/fock_kernel.hpp"
#include "pnrecon/states.hpp"

namespace pnrecon {

struct FitOptions {
  int max_iterations = 100000;
  /// Stop once max_n |p'_n - p_n| falls below this.
  double tolerance = 1e-10;
  /// Levels kept (n_edge); 0 means the full kernel dimension.
  std::size_t subspace = 0;
};

struct ReconstructionResult {
  PhotonDistribution estimate;
  /// K = -sum_i f_i ln(q_i / f_i).
  double relative_entropy = 0.0;
  /// S = -sum_i f_i ln f_i.
  double data_entropy = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Log-likelihood of the iterate before each step and after the last one.
  std::vector<double> loglik_trace;
  Eigen::VectorXd refit;
  /// Seed of the random starting point; 0 when the caller supplied `init`.
  std::uint64_t seed = 0;

  double k_over_s_percent() const {
    return data_entropy > 0.0 ? 100.0 * relative_entropy / data_entropy : 0.0;
  }
};

/// One multiplicative update. `kernel` must already be restricted to the
/// subspace and `p` must have the kernel's dimension.
///
/// Bins with f_i = 0 do not contribute to g_n. Throws DataError when some
/// f_i > 0 sees q_i = 0, where the likelihood is -infinity.
PhotonDistribution em_step(const ResponseKernel& kernel, const Eigen::VectorXd& frequencies,
                           const PhotonDistribution& p);

/// Log-likelihood sum_i f_i ln(q_i / sum_j q_j) of the refit `q`. When the
/// kernel resolves the identity on the subspace (R = 1) this is
/// sum_i f_i ln q_i; otherwise it is the in-grid conditional likelihood the
/// R-corrected update increases monotonically.
double log_likelihood(const Eigen::VectorXd& frequencies, const Eigen::VectorXd& q);

/// Iterates em_step from `init` until the estimate stops moving or the
/// iteration budget runs out. Non-convergence is flagged, not thrown.
ReconstructionResult reconstruct(const ResponseKernel& kernel, const Eigen::VectorXd& frequencies,
                                 const PhotonDistribution& init, const FitOptions& options);

/// Restart j starts from a uniform draw on the simplex seeded with seed + j.
/// Restarts may run on `threads` workers; the output order is restart order
/// and does not depend on scheduling.
std::vector<ReconstructionResult> run_restarts(const ResponseKernel& kernel,
                                               const Eigen::VectorXd& frequencies,
                                               std::size_t n_restarts, std::uint64_t seed,
                                               const FitOptions& options,
                                               unsigned threads = 1);

}  // namespace pnrecon
