#include "pnrecon/deterministic.hpp"

#include <fmt/format.h>

#include "pnrecon/diagnostics.hpp"
#include "pnrecon/error.hpp"

namespace pnrecon {

DeterministicResult linear_invert(const ResponseKernel& kernel, const Eigen::VectorXd& frequencies,
                                  std::size_t n_edge, double singular_cutoff) {
  if (n_edge == 0 || n_edge > kernel.dimension()) {
    throw InvalidArgument(fmt::format("subspace {} outside [1, {}]", n_edge, kernel.dimension()));
  }
  if (!(singular_cutoff > 0.0 && singular_cutoff < 1.0)) {
    throw InvalidArgument("singular value cutoff must lie in (0, 1)");
  }
  if (static_cast<std::size_t>(frequencies.size()) != kernel.bins()) {
    throw InvalidArgument(fmt::format("{} frequencies for a kernel with {} bins",
                                      frequencies.size(), kernel.bins()));
  }

  const auto cols = static_cast<Eigen::Index>(n_edge);
  const Eigen::MatrixXd a = kernel.h.leftCols(cols);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (sigma.size() == 0 || !(sigma[0] > 0.0)) throw NumericalError("kernel has rank zero");

  DeterministicResult out;
  const Eigen::VectorXd projected = svd.matrixU().transpose() * frequencies;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    if (sigma[j] < singular_cutoff * sigma[0]) break;
    x += svd.matrixV().col(j) * (projected[j] / sigma[j]);
    ++out.rank;
  }

  const double total = x.sum();
  if (!(total > 0.0)) {
    throw NumericalError(fmt::format("least-squares estimate sums to {:.6g}; cannot normalize", total));
  }
  out.estimate = x / total;
  out.negative_count = static_cast<int>((out.estimate.array() < 0.0).count());
  out.refit = a * out.estimate;
  out.relative_entropy = relative_entropy(frequencies, out.refit);
  out.data_entropy = shannon_entropy(frequencies);
  return out;
}

}  // namespace pnrecon
