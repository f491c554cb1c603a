#include "pnrecon/fock_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pnrecon/error.hpp"

namespace pnrecon {

namespace {

// Entries below this are subnormal noise for the estimators.
constexpr double kFlushBelow = 1e-300;

void check_order(int k) {
  if (k < 0 || k > kMaxOrder) {
    throw InvalidArgument("oscillator order " + std::to_string(k) +
                          " outside [0, " + std::to_string(kMaxOrder) + "]");
  }
}

void check_efficiency(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw InvalidArgument("detector efficiency must lie in (0, 1], got " +
                          std::to_string(eta));
  }
}

}  // namespace

OscillatorGrid OscillatorGrid::from_range(double lower, double upper,
                                          double width) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(width > 0.0) ||
      !(upper > lower)) {
    throw InvalidArgument("grid needs finite lower < upper and width > 0");
  }
  const double bins = (upper - lower) / width;
  const double rounded = std::round(bins);
  if (rounded < 1.0 || std::abs(bins - rounded) > 1e-9 * std::max(1.0, bins)) {
    throw InvalidArgument("grid span is not an integer number of bins");
  }
  const auto count = static_cast<std::size_t>(rounded);
  std::vector<double> centers(count);
  for (std::size_t i = 0; i < count; ++i) {
    centers[i] = lower + (static_cast<double>(i) + 0.5) * width;
  }
  return OscillatorGrid(std::move(centers), width);
}

OscillatorGrid OscillatorGrid::from_centers(std::vector<double> centers,
                                            double width) {
  if (centers.empty() || !(width > 0.0) || !std::isfinite(width)) {
    throw InvalidArgument("grid needs at least one center and width > 0");
  }
  for (std::size_t i = 1; i < centers.size(); ++i) {
    const double step = centers[i] - centers[i - 1];
    const double scale = std::max({std::abs(centers[i]), std::abs(centers[i - 1]), width});
    if (!(step > 0.0) || std::abs(step - width) > 1e-12 * width + 4e-16 * scale) {
      throw InvalidArgument("grid centers are not uniformly spaced by the bin width at index " +
                            std::to_string(i));
    }
  }
  return OscillatorGrid(std::move(centers), width);
}

OscillatorGrid OscillatorGrid::slice(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > centers_.size()) {
    throw InvalidArgument("grid slice out of range");
  }
  return OscillatorGrid(std::vector<double>(centers_.begin() + first,
                                            centers_.begin() + first + count),
                        width_);
}

ResponseKernel ResponseKernel::leading(std::size_t levels) const {
  if (levels == 0 || levels > dimension()) {
    throw InvalidArgument("kernel restriction to " + std::to_string(levels) +
                          " levels exceeds dimension " + std::to_string(dimension()));
  }
  ResponseKernel out;
  out.h = h.leftCols(static_cast<Eigen::Index>(levels));
  out.grid = grid;
  out.efficiency = efficiency;
  out.identity_diag = identity_diag.head(static_cast<Eigen::Index>(levels));
  return out;
}

void oscillator_pdf_row(double x, std::span<double> out) {
  if (!std::isfinite(x)) throw InvalidArgument("quadrature value is not finite");
  if (out.empty()) return;
  check_order(static_cast<int>(out.size()) - 1);

  // psi_0 carries the Gaussian factor so the recurrence stays O(1).
  double prev = 0.0;
  double cur = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(std::numbers::pi));
  out[0] = cur * cur;
  for (std::size_t k = 1; k < out.size(); ++k) {
    const double kd = static_cast<double>(k);
    const double next = x * std::sqrt(2.0 / kd) * cur - std::sqrt((kd - 1.0) / kd) * prev;
    prev = cur;
    cur = next;
    out[k] = cur * cur;
  }
}

double oscillator_pdf(int k, double x) {
  check_order(k);
  std::vector<double> row(static_cast<std::size_t>(k) + 1);
  oscillator_pdf_row(x, row);
  return row.back();
}

std::vector<double> binomial_loss_weights(int n, double eta) {
  check_efficiency(eta);
  if (n < 0 || n > kMaxOrder) {
    throw InvalidArgument("photon number " + std::to_string(n) + " outside [0, " +
                          std::to_string(kMaxOrder) + "]");
  }
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
  if (eta == 1.0) {
    w.back() = 1.0;
    return w;
  }

  // Start at the mode, where the weight is O(1/sqrt(n)), and recur outward.
  const double nd = n;
  const int mode = std::clamp(static_cast<int>(std::floor((nd + 1.0) * eta)), 0, n);
  const double log_mode = std::lgamma(nd + 1.0) - std::lgamma(mode + 1.0) -
                          std::lgamma(nd - mode + 1.0) + mode * std::log(eta) +
                          (nd - mode) * std::log1p(-eta);
  const double odds = eta / (1.0 - eta);
  w[mode] = std::exp(log_mode);
  for (int k = mode; k < n; ++k) {
    w[k + 1] = w[k] * (nd - k) / (k + 1.0) * odds;
  }
  for (int k = mode; k > 0; --k) {
    w[k - 1] = w[k] * k / (nd - k + 1.0) / odds;
  }

  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  return w;
}

ResponseKernel build_kernel(const OscillatorGrid& grid, double eta,
                            std::size_t dimension) {
  check_efficiency(eta);
  if (dimension == 0 || dimension > kMaxDimension) {
    throw InvalidArgument("kernel dimension must lie in [1, " +
                          std::to_string(kMaxDimension) + "]");
  }
  if (grid.size() == 0) throw InvalidArgument("kernel needs a non-empty grid");

  const auto levels = static_cast<int>(dimension);
  std::vector<std::vector<double>> weights;
  weights.reserve(dimension);
  for (int n = 0; n < levels; ++n) weights.push_back(binomial_loss_weights(n, eta));

  ResponseKernel kernel;
  kernel.grid = grid;
  kernel.efficiency = eta;
  kernel.h.resize(static_cast<Eigen::Index>(grid.size()), levels);

  const double dx = grid.width();
  std::vector<double> phi(dimension);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    oscillator_pdf_row(grid.centers()[i], phi);
    for (int n = 0; n < levels; ++n) {
      const auto& w = weights[n];
      double acc = 0.0;
      for (int k = 0; k <= n; ++k) acc += w[k] * phi[k];
      acc *= dx;
      kernel.h(static_cast<Eigen::Index>(i), n) = acc < kFlushBelow ? 0.0 : acc;
    }
  }
  kernel.identity_diag = kernel.h.colwise().sum().transpose();
  return kernel;
}

}  // namespace pnrecon
