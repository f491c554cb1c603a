#pragma once

// Goodness-of-fit and moment diagnostics, and the restart-ensemble report
// that exposes how much of the photon distribution the data leave free.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pnrecon/states.hpp"

namespace pnrecon {

struct ReconstructionResult;

/// K = -sum_{f_i > 0} f_i ln(q_i / f_i). Empty when some q_i <= 0 at f_i > 0.
std::optional<double> relative_entropy(const Eigen::VectorXd& f, const Eigen::VectorXd& q);

/// S = -sum_{f_i > 0} f_i ln f_i.
double shannon_entropy(const Eigen::VectorXd& f);

inline constexpr int kMaxMomentOrder = 50;

/// <n^k> = sum_n n^k p_n for 1 <= k <= 50, accumulated in log-sum-exp form.
double moment(const PhotonDistribution& p, int order);

/// sum_n n p_n for a vector that may carry negative entries.
double signed_mean(const Eigen::VectorXd& p);

struct EnsembleReport {
  std::vector<int> orders;
  std::vector<double> k_values;
  /// 100 K / S per restart.
  std::vector<double> k_over_s;
  /// moments[r][j] = <n^orders[j]> of restart r.
  std::vector<std::vector<double>> moments;
  PhotonDistribution average_estimate;
  /// Moments of the averaged estimate, the <n^k>_AV reference.
  std::vector<double> average_moments;
  /// moments[r][j] / average_moments[j] - 1.
  std::vector<std::vector<double>> relative_moment_deviations;

  /// max - min of the relative deviations for orders[j].
  double spread(std::size_t j) const;
};

/// A single result gives a degenerate report with zero deviations.
EnsembleReport aggregate_ensemble(const std::vector<ReconstructionResult>& results,
                                  const std::vector<int>& orders);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

/// Equal-width histogram of `values` over [min, max] (last bin closed).
std::vector<HistogramBin> value_histogram(const std::vector<double>& values, std::size_t bins);

}  // namespace pnrecon
