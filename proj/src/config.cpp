#include "pnrecon/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "pnrecon/diagnostics.hpp"
#include "pnrecon/error.hpp"
#include "pnrecon/fock_kernel.hpp"

namespace pnrecon {

using Json = nlohmann::ordered_json;

namespace {

template <typename T>
void read_field(const Json& obj, const char* key, T& field) {
  if (const auto it = obj.find(key); it != obj.end()) {
    try {
      field = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(fmt::format("config field '{}': {}", key, e.what()));
    }
  }
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw InvalidArgument(fmt::format("unknown config key '{}' in {}", key, where));
  }
}

}  // namespace

void RunConfig::validate() const {
  if (state.kind != "coherent" && state.kind != "squeezed" && state.kind != "thermal") {
    throw InvalidArgument("state.kind must be coherent, squeezed or thermal, got '" + state.kind + "'");
  }
  if (state.dimension == 0) throw InvalidArgument("state.dimension must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");
  if (!(grid.dx > 0.0) || !(grid.max > grid.min)) {
    throw InvalidArgument("grid needs min < max and dx > 0");
  }
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau must lie in (0, 1)");
  if (kernel_dimension == 0 || kernel_dimension > kMaxDimension) {
    throw InvalidArgument(fmt::format("kernel_dimension must lie in [1, {}]", kMaxDimension));
  }
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
  if (restarts == 0) throw InvalidArgument("restarts must be positive");
  for (int k : moment_orders) {
    if (k < 1 || k > kMaxMomentOrder) {
      throw InvalidArgument(fmt::format("moment order {} outside [1, {}]", k, kMaxMomentOrder));
    }
  }
  if (!(singular_cutoff > 0.0 && singular_cutoff < 1.0)) {
    throw InvalidArgument("singular_cutoff must lie in (0, 1)");
  }
  if (k_histogram_bins == 0) throw InvalidArgument("k_histogram_bins must be positive");
}

std::string RunConfig::describe_state() const {
  if (state.kind == "coherent") return fmt::format("coherent(mean={})", state.mean);
  if (state.kind == "thermal") return fmt::format("thermal(mean={})", state.mean);
  if (state.displacement != 0.0) {
    return fmt::format("squeezed(r={}, displacement={})", state.squeeze, state.displacement);
  }
  return fmt::format("squeezed(r={})", state.squeeze);
}

std::string to_json_text(const RunConfig& c) {
  Json j;
  j["state"] = {{"kind", c.state.kind},
                {"mean", c.state.mean},
                {"squeeze", c.state.squeeze},
                {"displacement", c.state.displacement},
                {"dimension", c.state.dimension}};
  j["eta"] = c.eta;
  j["grid"] = {{"min", c.grid.min}, {"max", c.grid.max}, {"dx", c.grid.dx}};
  j["n_samples"] = c.n_samples;
  j["seed"] = c.seed;
  j["tau"] = c.tau;
  j["kernel_dimension"] = c.kernel_dimension;
  j["subspace_cap"] = c.subspace_cap;
  j["fit"] = {{"tolerance", c.tolerance},
              {"max_iterations", c.max_iterations},
              {"restarts", c.restarts},
              {"threads", c.threads}};
  j["moment_orders"] = c.moment_orders;
  j["deterministic"] = {{"singular_cutoff", c.singular_cutoff}, {"no_eta", c.no_eta}};
  j["k_histogram_bins"] = c.k_histogram_bins;
  j["histogram"] = c.histogram;
  j["kernel"] = c.kernel;
  return j.dump(2) + "\n";
}

RunConfig config_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  reject_unknown(j,
                 {"state", "eta", "grid", "n_samples", "seed", "tau", "kernel_dimension",
                  "subspace_cap", "fit", "moment_orders", "deterministic", "k_histogram_bins",
                  "histogram", "kernel"},
                 "config");

  RunConfig c;
  if (const auto it = j.find("state"); it != j.end()) {
    reject_unknown(*it, {"kind", "mean", "squeeze", "displacement", "dimension"}, "state");
    read_field(*it, "kind", c.state.kind);
    read_field(*it, "mean", c.state.mean);
    read_field(*it, "squeeze", c.state.squeeze);
    read_field(*it, "displacement", c.state.displacement);
    read_field(*it, "dimension", c.state.dimension);
  }
  read_field(j, "eta", c.eta);
  if (const auto it = j.find("grid"); it != j.end()) {
    reject_unknown(*it, {"min", "max", "dx"}, "grid");
    read_field(*it, "min", c.grid.min);
    read_field(*it, "max", c.grid.max);
    read_field(*it, "dx", c.grid.dx);
  }
  read_field(j, "n_samples", c.n_samples);
  read_field(j, "seed", c.seed);
  read_field(j, "tau", c.tau);
  read_field(j, "kernel_dimension", c.kernel_dimension);
  read_field(j, "subspace_cap", c.subspace_cap);
  if (const auto it = j.find("fit"); it != j.end()) {
    reject_unknown(*it, {"tolerance", "max_iterations", "restarts", "threads"}, "fit");
    read_field(*it, "tolerance", c.tolerance);
    read_field(*it, "max_iterations", c.max_iterations);
    read_field(*it, "restarts", c.restarts);
    read_field(*it, "threads", c.threads);
  }
  read_field(j, "moment_orders", c.moment_orders);
  if (const auto it = j.find("deterministic"); it != j.end()) {
    reject_unknown(*it, {"singular_cutoff", "no_eta"}, "deterministic");
    read_field(*it, "singular_cutoff", c.singular_cutoff);
    read_field(*it, "no_eta", c.no_eta);
  }
  read_field(j, "k_histogram_bins", c.k_histogram_bins);
  read_field(j, "histogram", c.histogram);
  read_field(j, "kernel", c.kernel);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

}  // namespace pnrecon
