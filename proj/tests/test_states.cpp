#include <cmath>
#include <numbers>
#include <string>

#include <doctest.h>

#include "oracles.hpp"
#include "pnrecon/error.hpp"
#include "pnrecon/povm.hpp"
#include "pnrecon/states.hpp"

using namespace pnrecon;

namespace {

struct SampleStats {
  double mean = 0.0;
  double second = 0.0;
  double second_se = 0.0;  // standard error of the second moment
  double variance = 0.0;
};

SampleStats stats(const std::vector<double>& x) {
  long double s1 = 0, s2 = 0, s4 = 0;
  for (double v : x) {
    s1 += v;
    s2 += v * v;
    s4 += static_cast<long double>(v) * v * v * v;
  }
  const auto n = static_cast<long double>(x.size());
  SampleStats out;
  out.mean = static_cast<double>(s1 / n);
  out.second = static_cast<double>(s2 / n);
  out.variance = out.second - out.mean * out.mean;
  out.second_se = std::sqrt(static_cast<double>((s4 / n - (s2 / n) * (s2 / n)) / n));
  return out;
}

}  // namespace

TEST_SUITE("states") {

TEST_CASE("PhotonDistribution validation") {
  Eigen::VectorXd p(3);
  p << 0.2, 0.3, 0.5;
  CHECK_NOTHROW(PhotonDistribution{p});
  p[0] = -0.1;
  CHECK_THROWS_AS(PhotonDistribution{p}, InvalidArgument);
  p << 0.2, 0.3, 0.6;
  CHECK_THROWS_AS(PhotonDistribution{p}, InvalidArgument);
  CHECK(PhotonDistribution::normalized(p).values().sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(PhotonDistribution::fock(2, 3).mean() == 2.0);
}

TEST_CASE("coherent_pn") {
  const auto p1 = coherent_pn(1.0, 20);
  CHECK(p1[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  const auto p30 = coherent_pn(30.0, 80);
  CHECK(std::abs(p30.mean() - 30.0) < 1e-6);
  CHECK(std::abs(p30.values().sum() - 1.0) < 1e-12);

  try {
    coherent_pn(30.0, 40);
    FAIL("expected a tail-mass error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("requires dimension") != std::string::npos);
  }
}

TEST_CASE("squeezed_vacuum_pn") {
  CHECK(squeezed_vacuum_pn(1e-6, 10)[0] == doctest::Approx(1.0).epsilon(1e-10));
  for (double r : {0.3, 1.0, 1.5}) {
    const auto p = squeezed_vacuum_pn(r, 200);
    for (std::size_t n = 1; n < p.dimension(); n += 2) REQUIRE(p[n] == 0.0);
  }
  // At r = 1.5 the tail beyond 150 levels is 4.8e-8, so 200 levels are needed.
  const auto p = squeezed_vacuum_pn(1.5, 200);
  CHECK(std::abs(p.mean() - std::sinh(1.5) * std::sinh(1.5)) < 1e-6);
  CHECK_THROWS_AS(squeezed_vacuum_pn(1.5, 150), InvalidArgument);
  CHECK_THROWS_AS(squeezed_vacuum_pn(0.0, 10), InvalidArgument);

  // Closed form through log-gamma at m = 10.
  const double t = std::tanh(1.5);
  const double log_p20 = -std::log(std::cosh(1.5)) + std::lgamma(21.0) -
                         2.0 * (10.0 * std::log(2.0) + std::lgamma(11.0)) + 20.0 * std::log(t);
  CHECK(p[20] == doctest::Approx(std::exp(log_p20)).epsilon(1e-9));
}

TEST_CASE("thermal_pn") {
  const auto p = thermal_pn(1.0, 60);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t n = 0; n + 1 < p.dimension(); ++n) {
    REQUIRE(p[n + 1] / p[n] == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(std::abs(thermal_pn(5.0, 200).mean() - 5.0) < 1e-6);
}

TEST_CASE("displaced_squeezed_pn") {
  SUBCASE("no displacement reproduces squeezed vacuum") {
    const auto a = displaced_squeezed_pn(0.0, 1.5, 200);
    const auto b = squeezed_vacuum_pn(1.5, 200);
    CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("no squeezing reproduces a coherent state") {
    const auto a = displaced_squeezed_pn(std::sqrt(30.0), 0.0, 120);
    const auto b = coherent_pn(30.0, 120);
    CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("mean photon number alpha^2 + sinh^2 r") {
    const auto p = displaced_squeezed_pn(3.0, 0.5, 150);
    CHECK(std::abs(p.mean() - (9.0 + std::sinh(0.5) * std::sinh(0.5))) < 1e-8);
  }
}

TEST_CASE("binomial degradation scales the mean by eta") {
  for (double eta : {0.1, 0.5, 0.85, 1.0}) {
    for (const auto& p : {coherent_pn(30.0, 90), thermal_pn(2.0, 120), squeezed_vacuum_pn(1.0, 150)}) {
      CHECK(std::abs(degrade(p, eta).mean() - eta * p.mean()) < 1e-9);
    }
  }
}

TEST_CASE("sample_quadratures moments") {
  const auto hint = OscillatorGrid::from_range(-12.0, 12.0, 0.1);

  SUBCASE("vacuum variance is one half") {
    const auto x = sample_quadratures(PhotonDistribution::fock(0, 1), 0.6, 1000000, 11, hint);
    const auto s = stats(x);
    const double se = 0.5 * std::sqrt(2.0 / static_cast<double>(x.size()));
    CHECK(std::abs(s.variance - 0.5) < 3.0 * se);
  }
  SUBCASE("phase-averaged coherent state: <x^2> = 1/2 + eta n") {
    const auto x = sample_quadratures(coherent_pn(30.0, 100), 0.85, 1000000, 5, hint);
    const auto s = stats(x);
    CHECK(std::abs(s.second - oracle::second_moment(0.85, 30.0)) < 3.0 * s.second_se);
  }
}

TEST_CASE("sampling is deterministic per seed") {
  const auto hint = OscillatorGrid::from_range(-8.0, 8.0, 0.1);
  const auto p = thermal_pn(1.0, 60);
  const auto a = sample_quadratures(p, 0.85, 200000, 42, hint);
  const auto b = sample_quadratures(p, 0.85, 200000, 42, hint);
  const auto c = sample_quadratures(p, 0.85, 200000, 43, hint);
  CHECK(a == b);
  CHECK(a != c);
  // Chunk c uses seed + c: the second chunk of seed 42 is the first of seed 43.
  CHECK(std::equal(c.begin(), c.begin() + kSampleChunk, a.begin() + kSampleChunk));
  CHECK_THROWS_AS(sample_quadratures(p, 1.5, 10, 1, hint), InvalidArgument);
  CHECK_THROWS_AS(sample_quadratures(p, 0.5, 0, 1, hint), InvalidArgument);
}

TEST_CASE("Gaussian sampler matches the squeezed vacuum photon route") {
  const double eta = 0.85, r = 0.8;
  const auto x = sample_gaussian_quadratures(0.0, r, eta, 1000000, 9);
  const auto s = stats(x);
  const double expected = oracle::second_moment(eta, std::sinh(r) * std::sinh(r));
  CHECK(std::abs(s.second - expected) < 3.0 * s.second_se);
}

TEST_CASE("displaced squeezed sampler is consistent with the numerical photon distribution") {
  const double eta = 0.85, alpha = 2.0, r = 0.5;
  const auto grid = OscillatorGrid::from_range(-9.0, 9.0, 0.2);
  const auto binned = make_histogram(sample_gaussian_quadratures(alpha, r, eta, 1000000, 21), grid);
  const auto kernel = build_kernel(grid, eta, 80);
  const Eigen::VectorXd q = refit(kernel, displaced_squeezed_pn(alpha, r, 80));
  const Eigen::VectorXd f = binned.histogram.frequencies();
  const double n = static_cast<double>(binned.histogram.total);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] * n < 25.0) continue;
    worst = std::max(worst, std::abs(f[i] - q[i]) / std::sqrt(q[i] / n));
  }
  CHECK(worst < 5.0);
}

TEST_CASE("make_histogram") {
  const auto grid = OscillatorGrid::from_centers({0.0, 1.0, 2.0}, 1.0);
  SUBCASE("samples at a center fill one bin") {
    const auto b = make_histogram({1.0, 1.0, 1.0}, grid);
    CHECK(b.histogram.counts == std::vector<std::uint64_t>{0, 3, 0});
    CHECK(b.histogram.total == 3);
  }
  SUBCASE("bin boundaries belong to the upper bin") {
    const auto b = make_histogram({0.5, 1.5, -0.5}, grid);
    CHECK(b.histogram.counts == std::vector<std::uint64_t>{1, 1, 1});
  }
  SUBCASE("out-of-range samples are dropped and reported") {
    const auto b = make_histogram({-0.51, 2.5, 0.2, 7.0}, grid);
    CHECK(b.dropped == 3);
    CHECK(b.histogram.total == 1);
    CHECK(b.histogram.frequencies().sum() == 1.0);
  }
  SUBCASE("everything outside is a data error") {
    CHECK_THROWS_AS(make_histogram({10.0}, grid), DataError);
  }
}

TEST_CASE("bright coherent data fit inside +-12") {
  const auto grid = OscillatorGrid::from_range(-12.0, 12.0, 0.1);
  const auto b = make_histogram(sample_quadratures(coherent_pn(30.0, 100), 0.85, 1000000, 1, grid), grid);
  CHECK(b.dropped == 0);
  CHECK(b.histogram.total == 1000000);
}

TEST_CASE("histogram frequencies converge to the binned density") {
  const auto grid = OscillatorGrid::from_range(-8.0, 8.0, 0.2);
  const auto p = thermal_pn(2.0, 100);
  const Eigen::VectorXd expected = refit(build_kernel(grid, 0.85, 100), p);
  double previous = INFINITY;
  for (std::size_t n : {10000u, 100000u, 1000000u}) {
    const auto b = make_histogram(sample_quadratures(p, 0.85, n, 77, grid), grid);
    const double err = (b.histogram.frequencies() - expected).cwiseAbs().maxCoeff();
    CHECK(err < previous);
    previous = err;
  }
}

}  // TEST_SUITE
