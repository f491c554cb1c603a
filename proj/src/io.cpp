#include "pnrecon/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "pnrecon/error.hpp"

namespace pnrecon {

namespace {

namespace fs = std::filesystem;

// Minimal JSON emission so every real goes out through format_real; the
// vendored library prints shortest round-trip digits instead.
using Fields = std::vector<std::pair<std::string, std::string>>;

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

std::string real_or_null(double v) { return std::isfinite(v) ? format_real(v) : "null"; }

std::string real_array(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += real_or_null(v[i]);
  }
  return out + "]";
}

std::string real_array(const std::vector<double>& v) {
  return real_array(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

std::string object(const Fields& fields, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  std::string out = "{\n";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    out += pad + quoted(fields[i].first) + ": " + fields[i].second;
    out += i + 1 < fields.size() ? ",\n" : "\n";
  }
  return out + std::string(static_cast<std::size_t>(indent), ' ') + "}";
}

Fields result_fields(const ReconstructionResult& r, std::size_t n_edge) {
  return {{"estimate", real_array(r.estimate.values())},
          {"K", real_or_null(r.relative_entropy)},
          {"S", real_or_null(r.data_entropy)},
          {"K_over_S", real_or_null(r.k_over_s_percent() / 100.0)},
          {"iterations", std::to_string(r.iterations)},
          {"converged", r.converged ? "true" : "false"},
          {"refit", real_array(r.refit)},
          {"seed", std::to_string(r.seed)},
          {"n_edge", std::to_string(n_edge)},
          {"mean_n", real_or_null(r.estimate.mean())}};
}

std::string read_text(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open {} {}", what, path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json read_sidecar(const fs::path& csv) {
  const fs::path side = sidecar_path(csv);
  if (!fs::exists(side)) {
    throw DataError(fmt::format("missing JSON sidecar {} for {}", side.string(), csv.string()));
  }
  try {
    return nlohmann::json::parse(read_text(side, "sidecar"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("sidecar {} is not valid JSON: {}", side.string(), e.what()));
  }
}

template <typename T>
T sidecar_field(const nlohmann::json& j, const char* key, const fs::path& csv) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(fmt::format("sidecar of {} lacks a valid '{}'", csv.string(), key));
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& text, const fs::path& path, std::size_t line_no) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DataError(fmt::format("{}:{}: cannot parse '{}' as a number", path.string(), line_no, text));
  }
  return value;
}

// Lines of a CSV with trailing '\r' and the final empty line removed.
std::vector<std::string> csv_lines(const fs::path& path, const char* what) {
  std::istringstream in(read_text(path, what));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path side = csv;
  side.replace_extension(".json");
  return side;
}

std::string histogram_csv(const QuadratureHistogram& h) {
  std::string out = "x,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += format_real(h.grid.centers()[i]) + "," + std::to_string(h.counts[i]) + "\n";
  }
  return out;
}

std::string histogram_sidecar(const QuadratureHistogram& h, const HistogramMeta& meta) {
  return object({{"dx", format_real(h.grid.width())},
                 {"n_total", std::to_string(h.total)},
                 {"n_dropped", std::to_string(meta.n_dropped)},
                 {"seed", std::to_string(meta.seed)},
                 {"state_descriptor", quoted(meta.state_descriptor)},
                 {"grid_min", format_real(h.grid.lower_edge())},
                 {"grid_max", format_real(h.grid.upper_edge())}}) +
         "\n";
}

void write_histogram(const fs::path& csv, const QuadratureHistogram& h, const HistogramMeta& meta) {
  write_file_atomic(csv, histogram_csv(h));
  write_file_atomic(sidecar_path(csv), histogram_sidecar(h, meta));
}

HistogramFile read_histogram(const fs::path& csv) {
  const auto lines = csv_lines(csv, "histogram");
  if (lines.empty() || lines[0] != "x,count") {
    throw DataError(fmt::format("{}:1: expected header 'x,count'", csv.string()));
  }
  const nlohmann::json side = read_sidecar(csv);

  HistogramFile out;
  out.meta.dx = sidecar_field<double>(side, "dx", csv);
  out.meta.n_total = sidecar_field<std::uint64_t>(side, "n_total", csv);
  out.meta.n_dropped = side.value("n_dropped", std::uint64_t{0});
  out.meta.seed = side.value("seed", std::uint64_t{0});
  out.meta.state_descriptor = side.value("state_descriptor", std::string{});

  std::vector<double> centers;
  std::vector<std::uint64_t> counts;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto cells = split_csv(lines[l]);
    if (cells.size() != 2) {
      throw DataError(fmt::format("{}:{}: expected 2 fields, found {}", csv.string(), l + 1, cells.size()));
    }
    centers.push_back(parse_number<double>(cells[0], csv, l + 1));
    counts.push_back(parse_number<std::uint64_t>(cells[1], csv, l + 1));
  }
  if (centers.empty()) throw DataError(csv.string() + ": histogram has no bins");

  try {
    out.histogram.grid = OscillatorGrid::from_centers(std::move(centers), out.meta.dx);
  } catch (const InvalidArgument& e) {
    throw DataError(csv.string() + ": " + e.what());
  }
  out.histogram.counts = std::move(counts);
  for (auto c : out.histogram.counts) out.histogram.total += c;
  if (out.histogram.total != out.meta.n_total) {
    throw DataError(fmt::format("{}: counts sum to {} but the sidecar says n_total = {}", csv.string(),
                                out.histogram.total, out.meta.n_total));
  }
  if (out.histogram.total == 0) throw DataError(csv.string() + ": histogram is empty");
  return out;
}

std::string kernel_csv(const ResponseKernel& k) {
  std::string out = "x";
  for (std::size_t n = 0; n < k.dimension(); ++n) out += ",n" + std::to_string(n);
  out += "\n";
  for (Eigen::Index i = 0; i < k.h.rows(); ++i) {
    out += format_real(k.grid.centers()[static_cast<std::size_t>(i)]);
    for (Eigen::Index n = 0; n < k.h.cols(); ++n) out += "," + format_real(k.h(i, n));
    out += "\n";
  }
  return out;
}

std::string kernel_sidecar(const ResponseKernel& k) {
  return object({{"eta", format_real(k.efficiency)},
                 {"dx", format_real(k.grid.width())},
                 {"dimension", std::to_string(k.dimension())},
                 {"grid_min", format_real(k.grid.lower_edge())},
                 {"grid_max", format_real(k.grid.upper_edge())}}) +
         "\n";
}

void write_kernel(const fs::path& csv, const ResponseKernel& k) {
  write_file_atomic(csv, kernel_csv(k));
  write_file_atomic(sidecar_path(csv), kernel_sidecar(k));
}

ResponseKernel read_kernel(const fs::path& csv) {
  const auto lines = csv_lines(csv, "kernel");
  const nlohmann::json side = read_sidecar(csv);
  const auto dimension = sidecar_field<std::size_t>(side, "dimension", csv);
  const auto dx = sidecar_field<double>(side, "dx", csv);
  const auto eta = sidecar_field<double>(side, "eta", csv);

  std::string header = "x";
  for (std::size_t n = 0; n < dimension; ++n) header += ",n" + std::to_string(n);
  if (lines.empty() || lines[0] != header) {
    throw DataError(fmt::format("{}:1: expected header 'x,n0,...,n{}'", csv.string(), dimension - 1));
  }
  const std::size_t rows = lines.size() - 1;
  if (rows == 0) throw DataError(csv.string() + ": kernel has no rows");

  ResponseKernel k;
  k.efficiency = eta;
  k.h.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dimension));
  std::vector<double> centers;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto cells = split_csv(lines[l]);
    if (cells.size() != dimension + 1) {
      throw DataError(fmt::format("{}:{}: expected {} fields, found {}", csv.string(), l + 1,
                                  dimension + 1, cells.size()));
    }
    centers.push_back(parse_number<double>(cells[0], csv, l + 1));
    for (std::size_t n = 0; n < dimension; ++n) {
      const double v = parse_number<double>(cells[n + 1], csv, l + 1);
      if (!(v >= 0.0)) throw DataError(fmt::format("{}:{}: negative kernel entry", csv.string(), l + 1));
      k.h(static_cast<Eigen::Index>(l - 1), static_cast<Eigen::Index>(n)) = v;
    }
  }
  try {
    k.grid = OscillatorGrid::from_centers(std::move(centers), dx);
  } catch (const InvalidArgument& e) {
    throw DataError(csv.string() + ": " + e.what());
  }
  k.identity_diag = k.h.colwise().sum().transpose();
  return k;
}

std::string identity_csv(const Eigen::VectorXd& r) {
  std::string out = "n,R\n";
  for (Eigen::Index n = 0; n < r.size(); ++n) out += std::to_string(n) + "," + format_real(r[n]) + "\n";
  return out;
}

std::string refit_csv(const OscillatorGrid& grid, const Eigen::VectorXd& f, const Eigen::VectorXd& q) {
  std::string out = "x,f,q\n";
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    out += format_real(grid.centers()[static_cast<std::size_t>(i)]) + "," + format_real(f[i]) + "," +
           format_real(q[i]) + "\n";
  }
  return out;
}

std::string result_json(const ReconstructionResult& r, std::size_t n_edge) {
  return object(result_fields(r, n_edge)) + "\n";
}

std::string deterministic_json(const DeterministicResult& r, std::size_t n_edge, double mean_scale,
                               std::uint64_t seed) {
  const double k = r.relative_entropy.value_or(std::nan(""));
  const double mean = signed_mean(r.estimate);
  return object({{"estimate", real_array(r.estimate)},
                 {"K", real_or_null(k)},
                 {"S", real_or_null(r.data_entropy)},
                 {"K_over_S", real_or_null(r.data_entropy > 0.0 ? k / r.data_entropy : std::nan(""))},
                 {"iterations", "0"},
                 {"converged", "true"},
                 {"refit", real_array(r.refit)},
                 {"seed", std::to_string(seed)},
                 {"n_edge", std::to_string(n_edge)},
                 {"mean_n", real_or_null(mean)},
                 {"mean_n_corrected", real_or_null(mean * mean_scale)},
                 {"rank", std::to_string(r.rank)},
                 {"negative_count", std::to_string(r.negative_count)},
                 {"k_defined", r.k_defined() ? "true" : "false"}}) +
         "\n";
}

std::string ensemble_json(const std::vector<ReconstructionResult>& results, std::size_t n_edge) {
  std::string out = "[";
  for (std::size_t j = 0; j < results.size(); ++j) {
    out += j == 0 ? "\n  " : ",\n  ";
    out += object(result_fields(results[j], n_edge), 2);
  }
  return out + "\n]\n";
}

std::string ensemble_summary_csv(const EnsembleReport& report) {
  const auto column = [](int k) { return k == 1 ? std::string("mean_n") : "moment" + std::to_string(k); };
  std::string out = "restart,K,K_over_S_pct";
  for (int k : report.orders) out += "," + column(k);
  for (int k : report.orders) out += ",dev_" + column(k);
  out += "\n";
  for (std::size_t r = 0; r < report.k_values.size(); ++r) {
    out += std::to_string(r) + "," + format_real(report.k_values[r]) + "," +
           format_real(report.k_over_s[r]);
    for (double m : report.moments[r]) out += "," + format_real(m);
    for (double d : report.relative_moment_deviations[r]) out += "," + format_real(d);
    out += "\n";
  }
  return out;
}

std::string ensemble_report_json(const EnsembleReport& report) {
  std::vector<double> spreads;
  for (std::size_t j = 0; j < report.orders.size(); ++j) spreads.push_back(report.spread(j));
  std::string order_list = "[";
  for (std::size_t j = 0; j < report.orders.size(); ++j) {
    order_list += (j ? ", " : "") + std::to_string(report.orders[j]);
  }
  order_list += "]";
  return object({{"restarts", std::to_string(report.k_values.size())},
                 {"orders", order_list},
                 {"average_moments", real_array(report.average_moments)},
                 {"spreads", real_array(spreads)},
                 {"K", real_array(report.k_values)},
                 {"K_over_S_pct", real_array(report.k_over_s)},
                 {"average_estimate", real_array(report.average_estimate.values())}}) +
         "\n";
}

std::string histogram_bins_csv(const std::vector<HistogramBin>& bins) {
  std::string out = "lower,upper,count\n";
  for (const auto& b : bins) {
    out += format_real(b.lower) + "," + format_real(b.upper) + "," + std::to_string(b.count) + "\n";
  }
  return out;
}

}  // namespace pnrecon
