#include "pnrecon/maxlik.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "pnrecon/diagnostics.hpp"
#include "pnrecon/error.hpp"
#include "pnrecon/random.hpp"

namespace pnrecon {

namespace {

// Entries this small are set to zero so products with the kernel never go
// subnormal; subnormal arithmetic slows the iteration by an order of magnitude.
constexpr double kNegligibleProbability = 1e-250;

void check_frequencies(const ResponseKernel& kernel, const Eigen::VectorXd& f) {
  if (static_cast<std::size_t>(f.size()) != kernel.bins()) {
    throw InvalidArgument(fmt::format("{} frequencies for a kernel with {} bins", f.size(),
                                      kernel.bins()));
  }
  if ((f.array() < 0.0).any() || !f.allFinite()) {
    throw InvalidArgument("frequencies must be finite and nonnegative");
  }
  if (std::abs(f.sum() - 1.0) > 1e-9) {
    throw InvalidArgument(fmt::format("frequencies sum to {:.17g}, not 1", f.sum()));
  }
}

struct Workspace {
  Eigen::VectorXd q;
  Eigen::VectorXd ratio;
  Eigen::VectorXd g;
};

// next = normalize(p * g / R). Leaves the refit of `p` in ws.q.
void update(const ResponseKernel& kernel, const Eigen::VectorXd& f, const Eigen::VectorXd& p,
            Eigen::VectorXd& next, Workspace& ws) {
  ws.q.noalias() = kernel.h * p;
  ws.ratio.resize(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (f[i] > 0.0) {
      if (!(ws.q[i] > 0.0)) {
        throw DataError(fmt::format(
            "bin {} has frequency {:.6g} but zero predicted probability; likelihood is -inf", i,
            f[i]));
      }
      ws.ratio[i] = f[i] / ws.q[i];
    } else {
      ws.ratio[i] = 0.0;
    }
  }
  ws.g.noalias() = kernel.h.transpose() * ws.ratio;
  next.resize(p.size());
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    const double r = kernel.identity_diag[n];
    next[n] = r > 0.0 ? p[n] * ws.g[n] / r : 0.0;
  }
  const double total = next.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("EM update produced a non-normalizable estimate");
  }
  next /= total;
  for (double& v : next) {
    if (v < kNegligibleProbability) v = 0.0;
  }
}

}  // namespace

PhotonDistribution em_step(const ResponseKernel& kernel, const Eigen::VectorXd& frequencies,
                           const PhotonDistribution& p) {
  check_frequencies(kernel, frequencies);
  if (p.dimension() != kernel.dimension()) {
    throw InvalidArgument(fmt::format("estimate has {} levels, restricted kernel {}",
                                      p.dimension(), kernel.dimension()));
  }
  Workspace ws;
  Eigen::VectorXd next;
  update(kernel, frequencies, p.values(), next, ws);
  return PhotonDistribution(std::move(next), 1e-12);
}

double log_likelihood(const Eigen::VectorXd& frequencies, const Eigen::VectorXd& q) {
  const double mass = q.sum();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < frequencies.size(); ++i) {
    if (frequencies[i] > 0.0) acc += frequencies[i] * std::log(q[i] / mass);
  }
  return acc;
}

ReconstructionResult reconstruct(const ResponseKernel& full_kernel,
                                 const Eigen::VectorXd& frequencies,
                                 const PhotonDistribution& init, const FitOptions& options) {
  if (!(options.tolerance > 0.0)) throw InvalidArgument("fit tolerance must be positive");
  if (options.max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
  const std::size_t levels = options.subspace == 0 ? full_kernel.dimension() : options.subspace;
  if (levels > full_kernel.dimension()) {
    throw InvalidArgument(fmt::format("subspace {} exceeds kernel dimension {}", levels,
                                      full_kernel.dimension()));
  }
  if (init.dimension() != levels) {
    throw InvalidArgument(fmt::format("initial estimate has {} levels, subspace is {}",
                                      init.dimension(), levels));
  }
  if (!(init.values().array() > 0.0).all()) {
    throw InvalidArgument("initial estimate must be strictly positive on the subspace");
  }
  check_frequencies(full_kernel, frequencies);
  const ResponseKernel kernel = full_kernel.leading(levels);

  ReconstructionResult result;
  Workspace ws;
  Eigen::VectorXd p = init.values();
  Eigen::VectorXd next;
  for (int it = 0; it < options.max_iterations; ++it) {
    update(kernel, frequencies, p, next, ws);
    result.loglik_trace.push_back(log_likelihood(frequencies, ws.q));
    const double change = (next - p).cwiseAbs().maxCoeff();
    p.swap(next);
    result.iterations = it + 1;
    if (change < options.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.refit.noalias() = kernel.h * p;
  result.loglik_trace.push_back(log_likelihood(frequencies, result.refit));
  result.estimate = PhotonDistribution(std::move(p), 1e-12);
  result.data_entropy = shannon_entropy(frequencies);
  const std::optional<double> k = relative_entropy(frequencies, result.refit);
  if (!k) throw NumericalError("relative entropy undefined at the EM estimate");
  result.relative_entropy = *k;
  return result;
}

std::vector<ReconstructionResult> run_restarts(const ResponseKernel& kernel,
                                               const Eigen::VectorXd& frequencies,
                                               std::size_t n_restarts, std::uint64_t seed,
                                               const FitOptions& options, unsigned threads) {
  if (n_restarts == 0) throw InvalidArgument("at least one restart is required");
  const std::size_t levels = options.subspace == 0 ? kernel.dimension() : options.subspace;

  std::vector<std::optional<ReconstructionResult>> slots(n_restarts);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (std::size_t j = next++; j < n_restarts; j = next++) {
      try {
        const std::uint64_t restart_seed = seed + j;
        const PhotonDistribution init(uniform_simplex(static_cast<Eigen::Index>(levels), restart_seed),
                                      1e-12);
        slots[j] = reconstruct(kernel, frequencies, init, options);
        slots[j]->seed = restart_seed;
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_restarts;
      }
    }
  };

  const unsigned workers = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(n_restarts));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ReconstructionResult> results;
  results.reserve(n_restarts);
  for (auto& slot : slots) results.push_back(std::move(*slot));
  return results;
}

}  // namespace pnrecon
