#include "pnrecon/povm.hpp"

#include <string>

#include "pnrecon/error.hpp"
#include "pnrecon/states.hpp"

namespace pnrecon {

Eigen::VectorXd identity_diagonal(const ResponseKernel& kernel) {
  return kernel.h.colwise().sum().transpose();
}

SubspaceSelection select_subspace(const Eigen::VectorXd& r, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidArgument("subspace threshold must lie in (0, 1), got " + std::to_string(tau));
  }
  SubspaceSelection sel;
  sel.threshold = tau;
  sel.r_values = r;
  sel.n_edge = static_cast<std::size_t>(r.size());
  for (Eigen::Index n = 0; n < r.size(); ++n) {
    if (r[n] < tau) {
      sel.n_edge = static_cast<std::size_t>(n);
      break;
    }
  }
  return sel;
}

Eigen::VectorXd refit(const ResponseKernel& kernel, const Eigen::VectorXd& p) {
  if (p.size() > kernel.h.cols()) {
    throw InvalidArgument("distribution has " + std::to_string(p.size()) +
                          " levels but the kernel only " + std::to_string(kernel.h.cols()));
  }
  return kernel.h.leftCols(p.size()) * p;
}

Eigen::VectorXd refit(const ResponseKernel& kernel, const PhotonDistribution& p) {
  return refit(kernel, p.values());
}

}  // namespace pnrecon
