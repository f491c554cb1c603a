#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pnrecon {

struct StateSpec {
  /// "coherent", "squeezed" or "thermal".
  std::string kind = "coherent";
  double mean = 30.0;
  double squeeze = 0.0;
  /// Real coherent amplitude added to a squeezed state.
  double displacement = 0.0;
  /// Fock truncation of the generated distribution.
  std::size_t dimension = 200;

  bool operator==(const StateSpec&) const = default;
};

struct GridSpec {
  double min = -10.0;
  double max = 10.0;
  double dx = 0.1;

  bool operator==(const GridSpec&) const = default;
};

/// Everything a CLI run depends on. Serializes to a single JSON file; every
/// command writes the resolved copy next to its outputs.
struct RunConfig {
  StateSpec state;
  double eta = 0.85;
  GridSpec grid;
  std::uint64_t n_samples = 1000000;
  std::uint64_t seed = 1;
  double tau = 0.99;
  std::size_t kernel_dimension = 150;
  /// Upper bound on n_edge; 0 leaves the threshold cut alone.
  std::size_t subspace_cap = 0;
  double tolerance = 1e-10;
  int max_iterations = 100000;
  std::size_t restarts = 100;
  unsigned threads = 1;
  std::vector<int> moment_orders{1, 10, 50};
  double singular_cutoff = 1e-8;
  bool no_eta = false;
  std::size_t k_histogram_bins = 20;
  /// Input histogram CSV for fit, fit-det, ensemble and report.
  std::string histogram;
  /// Optional precomputed kernel CSV used instead of building one.
  std::string kernel;

  bool operator==(const RunConfig&) const = default;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;

  std::string describe_state() const;
};

std::string to_json_text(const RunConfig& config);
RunConfig config_from_json_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace pnrecon
