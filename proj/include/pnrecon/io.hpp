#pragma once

// File formats shared by the CLI commands. Numbers are written with 17
// significant digits so every file reads back to the same doubles.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pnrecon/deterministic.hpp"
#include "pnrecon/diagnostics.hpp"
#include "pnrecon/fock_kernel.hpp"
#include "pnrecon/maxlik.hpp"
#include "pnrecon/states.hpp"

namespace pnrecon {

/// `{:.17g}` rendering used for every floating-point value in data files.
std::string format_real(double v);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// JSON sidecar path for a CSV file: same stem, `.json` extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

struct HistogramMeta {
  double dx = 0.0;
  std::uint64_t n_total = 0;
  std::uint64_t n_dropped = 0;
  std::uint64_t seed = 0;
  std::string state_descriptor;
};

struct HistogramFile {
  QuadratureHistogram histogram;
  HistogramMeta meta;
};

/// CSV `x,count` plus its sidecar.
std::string histogram_csv(const QuadratureHistogram& h);
std::string histogram_sidecar(const QuadratureHistogram& h, const HistogramMeta& meta);
void write_histogram(const std::filesystem::path& csv, const QuadratureHistogram& h,
                     const HistogramMeta& meta);
/// Throws DataError naming the offending line, or when the sidecar is missing
/// or disagrees with the CSV.
HistogramFile read_histogram(const std::filesystem::path& csv);

/// CSV `x,n0,n1,...` plus sidecar {eta, dx, dimension, grid_min, grid_max}.
std::string kernel_csv(const ResponseKernel& k);
std::string kernel_sidecar(const ResponseKernel& k);
void write_kernel(const std::filesystem::path& csv, const ResponseKernel& k);
ResponseKernel read_kernel(const std::filesystem::path& csv);

/// Two-column CSV `n,R`.
std::string identity_csv(const Eigen::VectorXd& r);

/// CSV `x,f,q` of data against the refit.
std::string refit_csv(const OscillatorGrid& grid, const Eigen::VectorXd& f, const Eigen::VectorXd& q);

/// {estimate, K, S, K_over_S, iterations, converged, refit, seed, ...}.
std::string result_json(const ReconstructionResult& r, std::size_t n_edge);
std::string deterministic_json(const DeterministicResult& r, std::size_t n_edge,
                               double mean_scale, std::uint64_t seed);
/// JSON array of per-restart results.
std::string ensemble_json(const std::vector<ReconstructionResult>& results, std::size_t n_edge);
/// restart,K,K_over_S_pct,m<k>...,dev<k>...
std::string ensemble_summary_csv(const EnsembleReport& report);
std::string ensemble_report_json(const EnsembleReport& report);
std::string histogram_bins_csv(const std::vector<HistogramBin>& bins);

}  // namespace pnrecon
