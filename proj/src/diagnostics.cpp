#include "pnrecon/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pnrecon/error.hpp"
#include "pnrecon/maxlik.hpp"

namespace pnrecon {

std::optional<double> relative_entropy(const Eigen::VectorXd& f, const Eigen::VectorXd& q) {
  if (f.size() != q.size()) {
    throw InvalidArgument(fmt::format("{} frequencies but {} refit values", f.size(), q.size()));
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (!(f[i] > 0.0)) continue;
    if (!(q[i] > 0.0)) return std::nullopt;
    acc -= f[i] * std::log(q[i] / f[i]);
  }
  return acc;
}

double shannon_entropy(const Eigen::VectorXd& f) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (f[i] > 0.0) acc -= f[i] * std::log(f[i]);
  }
  return acc;
}

double moment(const PhotonDistribution& p, int order) {
  if (order < 1 || order > kMaxMomentOrder) {
    throw InvalidArgument(fmt::format("moment order {} outside [1, {}]", order, kMaxMomentOrder));
  }
  const auto& v = p.values();
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(v.size()));
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 1; n < v.size(); ++n) {
    if (!(v[n] > 0.0)) continue;
    logs.push_back(std::log(v[n]) + order * std::log(static_cast<double>(n)));
    top = std::max(top, logs.back());
  }
  if (logs.empty()) return 0.0;
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  return std::exp(top + std::log(acc));
}

double signed_mean(const Eigen::VectorXd& p) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < p.size(); ++n) acc += static_cast<double>(n) * p[n];
  return acc;
}

double EnsembleReport::spread(std::size_t j) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& row : relative_moment_deviations) {
    lo = std::min(lo, row.at(j));
    hi = std::max(hi, row.at(j));
  }
  return relative_moment_deviations.empty() ? 0.0 : hi - lo;
}

EnsembleReport aggregate_ensemble(const std::vector<ReconstructionResult>& results,
                                  const std::vector<int>& orders) {
  if (results.empty()) throw InvalidArgument("ensemble needs at least one result");
  const std::size_t levels = results.front().estimate.dimension();

  EnsembleReport report;
  report.orders = orders;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(levels));
  for (const auto& r : results) {
    if (r.estimate.dimension() != levels) {
      throw InvalidArgument("ensemble estimates have different dimensions");
    }
    sum += r.estimate.values();
    report.k_values.push_back(r.relative_entropy);
    report.k_over_s.push_back(r.k_over_s_percent());
    std::vector<double> row;
    for (int k : orders) row.push_back(moment(r.estimate, k));
    report.moments.push_back(std::move(row));
  }
  report.average_estimate = PhotonDistribution::normalized(sum / static_cast<double>(results.size()));
  for (int k : orders) report.average_moments.push_back(moment(report.average_estimate, k));

  for (const auto& row : report.moments) {
    std::vector<double> dev(orders.size());
    for (std::size_t j = 0; j < orders.size(); ++j) {
      const double av = report.average_moments[j];
      dev[j] = av != 0.0 ? row[j] / av - 1.0 : 0.0;
    }
    report.relative_moment_deviations.push_back(std::move(dev));
  }
  return report;
}

std::vector<HistogramBin> value_histogram(const std::vector<double>& values, std::size_t bins) {
  if (values.empty() || bins == 0) return {};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) return {HistogramBin{lo, hi, values.size()}};

  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lower = lo + static_cast<double>(b) * width;
    out[b].upper = b + 1 == bins ? hi : lo + static_cast<double>(b + 1) * width;
  }
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++out[std::min(b, bins - 1)].count;
  }
  return out;
}

}  // namespace pnrecon
