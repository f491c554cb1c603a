#pragma once

// The CLI subcommands as library calls. Each writes its outputs into
// `out_dir`, together with `<command>.config.json`, the fully resolved
// configuration that reproduces them.

#include <filesystem>
#include <ostream>

#include "pnrecon/config.hpp"

namespace pnrecon {

/// Default output directory when none is given on the command line.
inline constexpr const char* kOutputDirEnv = "PNRECON_OUTPUT_DIR";

/// histogram.csv + histogram.json.
void cmd_synth(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
/// kernel.csv + kernel.json from the configured grid, eta and dimension.
void cmd_kernel(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
/// fit.json + fit_refit.csv.
void cmd_fit(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
/// fit_det.json + fit_det_refit.csv.
void cmd_fit_det(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
/// ensemble.json, ensemble_summary.csv, ensemble_k_histogram.csv, ensemble_report.json.
void cmd_ensemble(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
/// identity.csv (n, R) on the histogram's grid, or the configured grid when
/// no histogram is given.
void cmd_report(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace pnrecon
