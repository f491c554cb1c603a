// pnrecon: photon-number reconstruction from random-phase homodyne histograms.
//
//   pnrecon synth    --config run.json --out DIR
//   pnrecon fit      DIR/histogram.csv --config run.json
//   pnrecon fit-det  DIR/histogram.csv --no-eta
//   pnrecon ensemble DIR/histogram.csv --restarts 100
//   pnrecon kernel | report
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 numerical failure. A fit that does not converge still exits 0.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pnrecon/commands.hpp"
#include "pnrecon/config.hpp"
#include "pnrecon/error.hpp"

namespace {

struct Overrides {
  std::string config_file;
  std::string out_dir;
  std::string histogram;
  std::string kernel;
  std::optional<std::string> state;
  std::optional<double> mean, squeeze, displacement, eta, tau, tolerance, cutoff;
  std::optional<double> grid_min, grid_max, dx;
  std::optional<std::uint64_t> samples, seed;
  std::optional<std::size_t> restarts, dimension, cap, state_dimension;
  std::optional<int> max_iterations;
  std::optional<unsigned> threads;
  bool no_eta = false;
};

void add_common(CLI::App* cmd, Overrides& o, bool takes_histogram) {
  cmd->add_option("--config,-c", o.config_file, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out,-o", o.out_dir, "output directory (default $PNRECON_OUTPUT_DIR or .)");
  if (takes_histogram) cmd->add_option("histogram", o.histogram, "histogram CSV with JSON sidecar");
  cmd->add_option("--kernel", o.kernel, "precomputed kernel CSV instead of building one");
  cmd->add_option("--state", o.state, "coherent, squeezed or thermal");
  cmd->add_option("--mean", o.mean, "mean photon number (coherent, thermal)");
  cmd->add_option("--squeeze", o.squeeze, "squeeze parameter r");
  cmd->add_option("--displacement", o.displacement, "coherent amplitude of a squeezed state");
  cmd->add_option("--state-dimension", o.state_dimension, "Fock truncation of the true state");
  cmd->add_option("--eta", o.eta, "detector efficiency");
  cmd->add_option("--grid-min", o.grid_min);
  cmd->add_option("--grid-max", o.grid_max);
  cmd->add_option("--dx", o.dx, "bin width");
  cmd->add_option("--samples,-n", o.samples, "number of quadrature samples");
  cmd->add_option("--seed", o.seed);
  cmd->add_option("--tau", o.tau, "identity-resolution threshold for n_edge");
  cmd->add_option("--dimension", o.dimension, "kernel dimension");
  cmd->add_option("--subspace-cap", o.cap, "upper bound on n_edge");
  cmd->add_option("--tolerance", o.tolerance);
  cmd->add_option("--max-iterations", o.max_iterations);
  cmd->add_option("--restarts", o.restarts);
  cmd->add_option("--threads", o.threads);
  cmd->add_option("--cutoff", o.cutoff, "relative singular value cutoff (fit-det)");
  cmd->add_flag("--no-eta", o.no_eta, "invert with an eta = 1 kernel (fit-det)");
}

pnrecon::RunConfig resolve(const Overrides& o) {
  pnrecon::RunConfig c = o.config_file.empty() ? pnrecon::RunConfig{} : pnrecon::load_config(o.config_file);
  if (!o.histogram.empty()) c.histogram = o.histogram;
  if (!o.kernel.empty()) c.kernel = o.kernel;
  if (o.state) c.state.kind = *o.state;
  if (o.mean) c.state.mean = *o.mean;
  if (o.squeeze) c.state.squeeze = *o.squeeze;
  if (o.displacement) c.state.displacement = *o.displacement;
  if (o.state_dimension) c.state.dimension = *o.state_dimension;
  if (o.eta) c.eta = *o.eta;
  if (o.grid_min) c.grid.min = *o.grid_min;
  if (o.grid_max) c.grid.max = *o.grid_max;
  if (o.dx) c.grid.dx = *o.dx;
  if (o.samples) c.n_samples = *o.samples;
  if (o.seed) c.seed = *o.seed;
  if (o.tau) c.tau = *o.tau;
  if (o.dimension) c.kernel_dimension = *o.dimension;
  if (o.cap) c.subspace_cap = *o.cap;
  if (o.tolerance) c.tolerance = *o.tolerance;
  if (o.max_iterations) c.max_iterations = *o.max_iterations;
  if (o.restarts) c.restarts = *o.restarts;
  if (o.threads) c.threads = *o.threads;
  if (o.cutoff) c.singular_cutoff = *o.cutoff;
  if (o.no_eta) c.no_eta = true;
  return c;
}

std::string output_dir(const Overrides& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv(pnrecon::kOutputDirEnv); env && *env) return env;
  return ".";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-number distribution reconstruction from random-phase homodyne data"};
  app.require_subcommand(1);

  using Command = void (*)(const pnrecon::RunConfig&, const std::filesystem::path&, std::ostream&);
  struct Entry {
    const char* name;
    const char* help;
    bool takes_histogram;
    Command run;
  };
  const Entry entries[] = {
      {"synth", "sample a synthetic quadrature histogram", false, pnrecon::cmd_synth},
      {"kernel", "export the response kernel", false, pnrecon::cmd_kernel},
      {"fit", "maximum-likelihood reconstruction", true, pnrecon::cmd_fit},
      {"fit-det", "truncated-SVD linear inversion baseline", true, pnrecon::cmd_fit_det},
      {"ensemble", "maximum-likelihood restarts from random starting points", true, pnrecon::cmd_ensemble},
      {"report", "identity-resolution diagonal R(n)", true, pnrecon::cmd_report},
  };

  Overrides overrides;
  std::vector<std::pair<CLI::App*, Command>> commands;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, overrides, e.takes_histogram);
    commands.emplace_back(sub, e.run);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const pnrecon::RunConfig config = resolve(overrides);
    for (const auto& [sub, run] : commands) {
      if (sub->parsed()) run(config, output_dir(overrides), std::cout);
    }
  } catch (const pnrecon::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const pnrecon::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
