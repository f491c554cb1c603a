#include "pnrecon/commands.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "pnrecon/deterministic.hpp"
#include "pnrecon/diagnostics.hpp"
#include "pnrecon/error.hpp"
#include "pnrecon/io.hpp"
#include "pnrecon/maxlik.hpp"
#include "pnrecon/povm.hpp"
#include "pnrecon/random.hpp"
#include "pnrecon/states.hpp"

namespace pnrecon {

namespace {

namespace fs = std::filesystem;

void emit_config(const RunConfig& config, const fs::path& out_dir, const char* command) {
  write_file_atomic(out_dir / fmt::format("{}.config.json", command), to_json_text(config));
}

OscillatorGrid configured_grid(const RunConfig& config) {
  return OscillatorGrid::from_range(config.grid.min, config.grid.max, config.grid.dx);
}

HistogramFile input_histogram(const RunConfig& config) {
  if (config.histogram.empty()) throw InvalidArgument("no input histogram given");
  return read_histogram(config.histogram);
}

// The grid always comes from the histogram; a precomputed kernel must match it.
ResponseKernel kernel_for(const RunConfig& config, const OscillatorGrid& grid, double eta) {
  if (config.kernel.empty()) return build_kernel(grid, eta, config.kernel_dimension);
  ResponseKernel k = read_kernel(config.kernel);
  bool same = k.grid.size() == grid.size() && std::abs(k.grid.width() - grid.width()) <= 1e-12 * grid.width();
  for (std::size_t i = 0; same && i < grid.size(); ++i) {
    same = std::abs(k.grid.centers()[i] - grid.centers()[i]) <= 1e-12 * std::max(1.0, std::abs(grid.centers()[i]));
  }
  if (!same) throw DataError("kernel file grid does not match the histogram grid");
  return k;
}

std::size_t trusted_levels(const RunConfig& config, const ResponseKernel& kernel, std::ostream& log) {
  const SubspaceSelection sel = select_subspace(kernel.identity_diag, config.tau);
  std::size_t n_edge = sel.n_edge;
  if (config.subspace_cap > 0) n_edge = std::min(n_edge, config.subspace_cap);
  if (n_edge == 0) {
    throw DataError(fmt::format("no trusted subspace: R(0) = {:.6g} is below tau = {:.6g}",
                                kernel.identity_diag.size() ? kernel.identity_diag[0] : 0.0, config.tau));
  }
  fmt::print(log, "n_edge = {} (tau = {:.6g}, threshold cut {}, dimension {})\n", n_edge, config.tau,
             sel.n_edge, kernel.dimension());
  return n_edge;
}

FitOptions fit_options(const RunConfig& config, std::size_t n_edge) {
  FitOptions o;
  o.max_iterations = config.max_iterations;
  o.tolerance = config.tolerance;
  o.subspace = n_edge;
  return o;
}

}  // namespace

void cmd_synth(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  config.validate();
  if (config.n_samples == 0) throw InvalidArgument("n_samples must be positive");
  const OscillatorGrid grid = configured_grid(config);
  const auto& s = config.state;

  std::vector<double> samples;
  if (s.kind == "squeezed" && s.displacement > 0.0) {
    samples = sample_gaussian_quadratures(s.displacement, s.squeeze, config.eta, config.n_samples,
                                          config.seed);
  } else {
    const PhotonDistribution p = s.kind == "coherent"  ? coherent_pn(s.mean, s.dimension)
                                 : s.kind == "thermal" ? thermal_pn(s.mean, s.dimension)
                                                       : squeezed_vacuum_pn(s.squeeze, s.dimension);
    samples = sample_quadratures(p, config.eta, config.n_samples, config.seed, grid);
  }
  const BinnedSamples binned = make_histogram(samples, grid);

  HistogramMeta meta;
  meta.dx = grid.width();
  meta.n_total = binned.histogram.total;
  meta.n_dropped = binned.dropped;
  meta.seed = config.seed;
  meta.state_descriptor = config.describe_state();
  write_histogram(out_dir / "histogram.csv", binned.histogram, meta);
  emit_config(config, out_dir, "synth");

  if (binned.dropped > 0) {
    fmt::print(log, "warning: {} samples fell outside [{:.6g}, {:.6g}) and were dropped\n",
               binned.dropped, grid.lower_edge(), grid.upper_edge());
  }
  fmt::print(log, "{}: N = {}, dropped = {}, bins = {}\n", meta.state_descriptor, meta.n_total,
             meta.n_dropped, grid.size());
}

void cmd_kernel(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  config.validate();
  const ResponseKernel kernel = build_kernel(configured_grid(config), config.eta, config.kernel_dimension);
  write_kernel(out_dir / "kernel.csv", kernel);
  emit_config(config, out_dir, "kernel");
  fmt::print(log, "kernel: {} bins x {} levels, eta = {:.6g}, min R = {:.6g}, max R = {:.6g}\n",
             kernel.bins(), kernel.dimension(), kernel.efficiency, kernel.identity_diag.minCoeff(),
             kernel.identity_diag.maxCoeff());
}

void cmd_fit(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  config.validate();
  const HistogramFile input = input_histogram(config);
  const Eigen::VectorXd f = input.histogram.frequencies();
  const ResponseKernel kernel = kernel_for(config, input.histogram.grid, config.eta);
  const std::size_t n_edge = trusted_levels(config, kernel, log);

  const PhotonDistribution init(uniform_simplex(static_cast<Eigen::Index>(n_edge), config.seed), 1e-12);
  ReconstructionResult result = reconstruct(kernel, f, init, fit_options(config, n_edge));
  result.seed = config.seed;

  write_file_atomic(out_dir / "fit.json", result_json(result, n_edge));
  write_file_atomic(out_dir / "fit_refit.csv", refit_csv(input.histogram.grid, f, result.refit));
  emit_config(config, out_dir, "fit");

  fmt::print(log, "MaxLik: iterations = {}, converged = {}, K = {:.6g}, S = {:.6g}, K/S = {:.3g}%, <n> = {:.6g}\n",
             result.iterations, result.converged, result.relative_entropy, result.data_entropy,
             result.k_over_s_percent(), result.estimate.mean());
}

void cmd_fit_det(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  config.validate();
  const HistogramFile input = input_histogram(config);
  const Eigen::VectorXd f = input.histogram.frequencies();
  const double eta = config.no_eta ? 1.0 : config.eta;
  const ResponseKernel kernel = kernel_for(config, input.histogram.grid, eta);
  const std::size_t n_edge = trusted_levels(config, kernel, log);

  const DeterministicResult result = linear_invert(kernel, f, n_edge, config.singular_cutoff);
  const double mean_scale = config.no_eta ? 1.0 / config.eta : 1.0;

  write_file_atomic(out_dir / "fit_det.json", deterministic_json(result, n_edge, mean_scale, config.seed));
  write_file_atomic(out_dir / "fit_det_refit.csv", refit_csv(input.histogram.grid, f, result.refit));
  emit_config(config, out_dir, "fit-det");

  const double mean = signed_mean(result.estimate);
  fmt::print(log, "deterministic: rank = {}, negative elements = {}, K = {}, <n> = {:.6g}", result.rank,
             result.negative_count,
             result.relative_entropy ? fmt::format("{:.6g} (K/S = {:.3g}%)", *result.relative_entropy,
                                                   100.0 * *result.relative_entropy / result.data_entropy)
                                     : std::string("undefined"),
             mean);
  if (config.no_eta) fmt::print(log, ", <n>/eta = {:.6g}", mean * mean_scale);
  fmt::print(log, "\n");
}

void cmd_ensemble(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  config.validate();
  const HistogramFile input = input_histogram(config);
  const Eigen::VectorXd f = input.histogram.frequencies();
  const ResponseKernel kernel = kernel_for(config, input.histogram.grid, config.eta);
  const std::size_t n_edge = trusted_levels(config, kernel, log);

  const auto results = run_restarts(kernel, f, config.restarts, config.seed, fit_options(config, n_edge),
                                    config.threads);
  const EnsembleReport report = aggregate_ensemble(results, config.moment_orders);

  write_file_atomic(out_dir / "ensemble.json", ensemble_json(results, n_edge));
  write_file_atomic(out_dir / "ensemble_summary.csv", ensemble_summary_csv(report));
  write_file_atomic(out_dir / "ensemble_k_histogram.csv",
                    histogram_bins_csv(value_histogram(report.k_values, config.k_histogram_bins)));
  write_file_atomic(out_dir / "ensemble_report.json", ensemble_report_json(report));
  emit_config(config, out_dir, "ensemble");

  const auto converged = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.converged; });
  const auto [kmin, kmax] = std::minmax_element(report.k_over_s.begin(), report.k_over_s.end());
  fmt::print(log, "ensemble: {} restarts, {} converged, K/S in [{:.3g}%, {:.3g}%]\n", results.size(),
             converged, *kmin, *kmax);
  for (std::size_t j = 0; j < report.orders.size(); ++j) {
    fmt::print(log, "  <n^{}>_AV = {:.6g}, spread of relative deviation = {:.6g}\n", report.orders[j],
               report.average_moments[j], report.spread(j));
  }
}

void cmd_report(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  config.validate();
  const OscillatorGrid grid =
      config.histogram.empty() ? configured_grid(config) : input_histogram(config).histogram.grid;
  const ResponseKernel kernel = kernel_for(config, grid, config.eta);
  const Eigen::VectorXd r = identity_diagonal(kernel);
  write_file_atomic(out_dir / "identity.csv", identity_csv(r));
  emit_config(config, out_dir, "report");
  const SubspaceSelection sel = select_subspace(r, config.tau);
  fmt::print(log, "R(n) over {} levels; n_edge = {} at tau = {:.6g}\n", r.size(), sel.n_edge, config.tau);
}

}  // namespace pnrecon
