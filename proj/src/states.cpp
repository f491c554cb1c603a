#include "pnrecon/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "pnrecon/error.hpp"
#include "pnrecon/random.hpp"

namespace pnrecon {

namespace {

constexpr std::size_t kMaxTerms = 100000;
// Terms below this fraction of the peak no longer matter for the tail test.
constexpr double kNegligible = 1e-40;

bool keep_going(std::size_t n, std::size_t dimension, double term, double peak,
                double mean) {
  if (n >= kMaxTerms) return false;
  if (n < dimension || static_cast<double>(n) < mean + 1.0) return true;
  return term > kNegligible * peak;
}

// `terms` is the untruncated distribution, long enough that what lies beyond
// it is negligible. Cuts it at `dimension` or reports the dimension required.
PhotonDistribution truncate(const std::vector<double>& terms, std::size_t dimension,
                            const char* what) {
  if (dimension == 0) throw InvalidArgument(std::string(what) + ": dimension must be positive");
  std::vector<double> suffix(terms.size() + 1, 0.0);
  for (std::size_t n = terms.size(); n-- > 0;) suffix[n] = suffix[n + 1] + terms[n];
  const double total = suffix[0];
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError(std::string(what) + ": photon distribution is not normalizable");
  }
  const double tail = dimension < suffix.size() ? suffix[dimension] / total : 0.0;
  if (tail >= kMaxTailMass) {
    std::size_t required = dimension;
    while (required < terms.size() && suffix[required] / total >= kMaxTailMass) ++required;
    throw InvalidArgument(fmt::format(
        "{}: tail mass {:.3g} beyond dimension {} exceeds {:g}; requires dimension >= {}", what,
        tail, dimension, kMaxTailMass, required));
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension));
  const std::size_t kept = std::min(dimension, terms.size());
  for (std::size_t n = 0; n < kept; ++n) p[static_cast<Eigen::Index>(n)] = terms[n];
  return PhotonDistribution::normalized(std::move(p));
}

void check_efficiency(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw InvalidArgument("detector efficiency must lie in (0, 1], got " + std::to_string(eta));
  }
}

// Fills out[c * kSampleChunk ...] chunk by chunk, each chunk with its own seed.
template <typename Draw>
std::vector<double> sample_chunked(std::size_t n_samples, std::uint64_t seed, Draw draw) {
  std::vector<double> out(n_samples);
  const std::size_t chunks = (n_samples + kSampleChunk - 1) / kSampleChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    Rng rng(seed + c);
    const std::size_t end = std::min(n_samples, (c + 1) * kSampleChunk);
    for (std::size_t i = c * kSampleChunk; i < end; ++i) out[i] = draw(rng);
  }
  return out;
}

}  // namespace

PhotonDistribution::PhotonDistribution(Eigen::VectorXd p, double tolerance) : p_(std::move(p)) {
  if (p_.size() == 0) throw InvalidArgument("photon distribution is empty");
  for (Eigen::Index n = 0; n < p_.size(); ++n) {
    if (!(p_[n] >= 0.0) || !std::isfinite(p_[n])) {
      throw InvalidArgument(fmt::format("photon distribution entry {} is {}", n, p_[n]));
    }
  }
  const double total = p_.sum();
  if (std::abs(total - 1.0) > tolerance) {
    throw InvalidArgument(fmt::format("photon distribution sums to {:.17g}", total));
  }
}

PhotonDistribution PhotonDistribution::normalized(Eigen::VectorXd raw) {
  if (raw.size() == 0) throw InvalidArgument("photon distribution is empty");
  if ((raw.array() < 0.0).any() || !raw.allFinite()) {
    throw InvalidArgument("cannot normalize a vector with negative or non-finite entries");
  }
  const double total = raw.sum();
  if (!(total > 0.0)) throw InvalidArgument("cannot normalize a zero vector");
  raw /= total;
  return PhotonDistribution(std::move(raw), 1e-12);
}

PhotonDistribution PhotonDistribution::fock(std::size_t level, std::size_t dimension) {
  if (level >= dimension) throw InvalidArgument("Fock level outside the dimension");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension));
  p[static_cast<Eigen::Index>(level)] = 1.0;
  return PhotonDistribution(std::move(p));
}

double PhotonDistribution::mean() const {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < p_.size(); ++n) acc += static_cast<double>(n) * p_[n];
  return acc;
}

PhotonDistribution coherent_pn(double mean, std::size_t dimension) {
  if (!(mean > 0.0) || mean > 700.0) {
    throw InvalidArgument("coherent mean photon number must lie in (0, 700]");
  }
  std::vector<double> terms{std::exp(-mean)};
  double peak = terms[0];
  while (keep_going(terms.size(), dimension, terms.back(), peak, mean)) {
    const double n = static_cast<double>(terms.size());
    terms.push_back(terms.back() * mean / n);
    peak = std::max(peak, terms.back());
  }
  return truncate(terms, dimension, "coherent state");
}

PhotonDistribution squeezed_vacuum_pn(double squeeze, std::size_t dimension) {
  if (!(squeeze > 0.0) || !std::isfinite(squeeze)) {
    throw InvalidArgument("squeeze parameter must be positive and finite");
  }
  const double t2 = std::tanh(squeeze) * std::tanh(squeeze);
  const double mean = std::sinh(squeeze) * std::sinh(squeeze);
  std::vector<double> terms{1.0 / std::cosh(squeeze)};
  const double peak = terms[0];
  const auto last_even = [&] { return terms[(terms.size() - 1) & ~std::size_t{1}]; };
  while (keep_going(terms.size(), dimension, last_even(), peak, mean)) {
    const std::size_t n = terms.size();
    if (n % 2 == 1) {
      terms.push_back(0.0);
    } else {
      // p_{2m+2} = p_{2m} tanh^2 r (2m+1)/(2m+2)
      const double m = static_cast<double>(n / 2 - 1);
      terms.push_back(terms[n - 2] * t2 * (2.0 * m + 1.0) / (2.0 * m + 2.0));
    }
  }
  return truncate(terms, dimension, "squeezed vacuum");
}

PhotonDistribution thermal_pn(double mean, std::size_t dimension) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw InvalidArgument("thermal mean photon number must be positive and finite");
  }
  const double ratio = mean / (1.0 + mean);
  std::vector<double> terms{1.0 / (1.0 + mean)};
  const double peak = terms[0];
  while (keep_going(terms.size(), dimension, terms.back(), peak, mean)) {
    terms.push_back(terms.back() * ratio);
  }
  return truncate(terms, dimension, "thermal state");
}

PhotonDistribution displaced_squeezed_pn(double displacement, double squeeze,
                                         std::size_t dimension) {
  if (!(displacement >= 0.0) || !(squeeze >= 0.0) || !std::isfinite(displacement) ||
      !std::isfinite(squeeze)) {
    throw InvalidArgument("displacement and squeeze must be finite and nonnegative");
  }
  if (displacement == 0.0 && squeeze == 0.0) return PhotonDistribution::fock(0, dimension);
  const double ch = std::cosh(squeeze);
  const double sh = std::sinh(squeeze);
  const double beta = displacement * std::exp(squeeze);
  const double mean = displacement * displacement + sh * sh;

  // Unnormalized amplitudes; c_0 = 1 and the whole sequence is rescaled later.
  double prev = 0.0;
  double cur = 1.0;
  std::vector<double> terms{1.0};
  double peak = 1.0;
  // Amplitudes of squeezed light vanish on alternate levels, so test two terms.
  const auto last_pair = [&] {
    return std::max(terms.back(), terms[terms.size() > 1 ? terms.size() - 2 : 0]);
  };
  while (keep_going(terms.size(), dimension, last_pair(), peak, mean)) {
    const double n = static_cast<double>(terms.size() - 1);
    const double next = (beta * cur - sh * std::sqrt(n) * prev) / (ch * std::sqrt(n + 1.0));
    prev = cur;
    cur = next;
    terms.push_back(cur * cur);
    if (!std::isfinite(terms.back())) {
      throw NumericalError("displaced squeezed amplitudes overflow; displacement too large");
    }
    peak = std::max(peak, terms.back());
  }
  return truncate(terms, dimension, "displaced squeezed state");
}

PhotonDistribution degrade(const PhotonDistribution& p, double eta) {
  check_efficiency(eta);
  const auto levels = static_cast<Eigen::Index>(p.dimension());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(levels);
  for (Eigen::Index n = 0; n < levels; ++n) {
    if (p[static_cast<std::size_t>(n)] == 0.0) continue;
    const auto w = binomial_loss_weights(static_cast<int>(n), eta);
    for (Eigen::Index k = 0; k <= n; ++k) out[k] += p[static_cast<std::size_t>(n)] * w[static_cast<std::size_t>(k)];
  }
  return PhotonDistribution::normalized(std::move(out));
}

std::vector<double> sample_quadratures(const PhotonDistribution& p, double eta,
                                       std::size_t n_samples, std::uint64_t seed,
                                       const OscillatorGrid& hint) {
  check_efficiency(eta);
  if (n_samples == 0) throw InvalidArgument("number of samples must be positive");
  if (hint.size() == 0) throw InvalidArgument("sampler needs a grid hint");

  const PhotonDistribution detected = degrade(p, eta);
  const double margin = 6.0 * std::numbers::sqrt2 / 2.0;
  const double lo = hint.lower_edge() - margin;
  const double hi = hint.upper_edge() + margin;
  const double step = hint.width() / 8.0;
  const auto nodes = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;

  std::vector<double> phi(detected.dimension());
  std::vector<double> cdf(nodes, 0.0);
  double prev_pdf = 0.0;
  for (std::size_t j = 0; j < nodes; ++j) {
    oscillator_pdf_row(lo + static_cast<double>(j) * step, phi);
    double pdf = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) pdf += detected[k] * phi[k];
    if (j > 0) cdf[j] = cdf[j - 1] + 0.5 * (pdf + prev_pdf) * step;
    prev_pdf = pdf;
  }
  const double total = cdf.back();
  if (!(total > 0.0)) throw NumericalError("quadrature density vanishes on the sampling table");

  return sample_chunked(n_samples, seed, [&](Rng& rng) {
    const double target = rng.uniform() * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), nodes - 1);
    const double c0 = cdf[j - 1];
    const double c1 = cdf[j];
    const double frac = c1 > c0 ? (target - c0) / (c1 - c0) : 0.5;
    return lo + (static_cast<double>(j - 1) + frac) * step;
  });
}

std::vector<double> sample_gaussian_quadratures(double displacement, double squeeze,
                                                double eta, std::size_t n_samples,
                                                std::uint64_t seed) {
  check_efficiency(eta);
  if (n_samples == 0) throw InvalidArgument("number of samples must be positive");
  if (!(displacement >= 0.0) || !(squeeze >= 0.0)) {
    throw InvalidArgument("displacement and squeeze must be nonnegative");
  }
  const double amp = std::sqrt(2.0 * eta) * displacement;
  const double squeezed = std::exp(-2.0 * squeeze);
  const double anti = std::exp(2.0 * squeeze);
  return sample_chunked(n_samples, seed, [&](Rng& rng) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double var = eta * (squeezed * c * c + anti * s * s) / 2.0 + (1.0 - eta) / 2.0;
    return amp * c + std::sqrt(var) * rng.normal();
  });
}

Eigen::VectorXd QuadratureHistogram::frequencies() const {
  Eigen::VectorXd f(static_cast<Eigen::Index>(counts.size()));
  const double n = static_cast<double>(total);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    f[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) / n;
  }
  return f;
}

BinnedSamples make_histogram(const std::vector<double>& samples, const OscillatorGrid& grid) {
  if (grid.size() == 0) throw InvalidArgument("histogram needs a non-empty grid");
  const std::size_t bins = grid.size();
  const double first = grid.centers().front();
  const double width = grid.width();
  const double lo = grid.lower_edge();
  const double hi = grid.upper_edge();
  const auto edge = [&](std::size_t j) { return first + (static_cast<double>(j) - 0.5) * width; };

  BinnedSamples out;
  out.histogram.grid = grid;
  out.histogram.counts.assign(bins, 0);
  for (double x : samples) {
    if (!(x >= lo && x < hi)) {
      ++out.dropped;
      continue;
    }
    auto j = static_cast<std::size_t>(
        std::clamp(std::floor((x - lo) / width), 0.0, static_cast<double>(bins - 1)));
    while (j > 0 && x < edge(j)) --j;
    while (j + 1 < bins && x >= edge(j + 1)) ++j;
    ++out.histogram.counts[j];
    ++out.histogram.total;
  }
  if (out.histogram.total == 0) {
    throw DataError("no samples fall inside the histogram grid");
  }
  return out;
}

}  // namespace pnrecon
