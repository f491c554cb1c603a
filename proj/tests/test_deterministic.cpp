#include <cmath>
#include <random>

#include <doctest.h>

#include "pnrecon/deterministic.hpp"
#include "pnrecon/error.hpp"
#include "pnrecon/maxlik.hpp"
#include "pnrecon/povm.hpp"
#include "pnrecon/random.hpp"

using namespace pnrecon;

namespace {

ResponseKernel from_matrix(const Eigen::MatrixXd& h) {
  ResponseKernel k;
  k.h = h;
  k.identity_diag = h.colwise().sum().transpose();
  return k;
}

}  // namespace

TEST_SUITE("estimator_det") {

TEST_CASE("square invertible toy kernel") {
  Eigen::MatrixXd h(2, 2);
  h << 0.6, 0.2,
       0.4, 0.8;
  const auto r = linear_invert(from_matrix(h), Eigen::Vector2d(0.4, 0.6), 2);
  CHECK(r.estimate[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.estimate[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK((r.refit - Eigen::Vector2d(0.4, 0.6)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(r.negative_count == 0);
  REQUIRE(r.k_defined());
  CHECK(std::abs(*r.relative_entropy) < 1e-14);
  CHECK(r.rank == 2);
}

TEST_CASE("consistent noiseless data are inverted exactly") {
  const auto grid = OscillatorGrid::from_range(-8.0, 8.0, 0.1);
  const auto kernel = build_kernel(grid, 0.85, 12);
  const auto truth = PhotonDistribution::normalized(thermal_pn(1.0, 40).values().head(12));
  const Eigen::VectorXd f = refit(kernel, truth) / refit(kernel, truth).sum();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(kernel.h);
  REQUIRE(svd.singularValues()[0] / svd.singularValues()[11] < 1e6);
  const auto r = linear_invert(kernel, f, 12);
  CHECK((r.estimate - truth.values()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("negative entries are kept and K is flagged when the refit is not positive") {
  Eigen::MatrixXd h(3, 2);
  h << 0.7, 0.0,
       0.3, 0.3,
       0.0, 0.7;
  // Data favouring bin 0 so strongly that the least-squares p_1 goes negative.
  const auto r = linear_invert(from_matrix(h), Eigen::Vector3d(0.9, 0.1, 0.0 + 1e-3) / 1.001, 2);
  CHECK(r.negative_count == 1);
  CHECK(r.estimate[1] < 0.0);
  CHECK_FALSE(r.k_defined());
}

TEST_CASE("renormalization keeps the sign pattern of the least-squares solution") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::MatrixXd h(8, 4);
    for (auto& v : h.reshaped()) v = u(rng);
    Eigen::VectorXd f(8);
    for (auto& v : f) v = u(rng);
    f /= f.sum();
    const Eigen::VectorXd raw = h.colPivHouseholderQr().solve(f);
    if (!(raw.sum() > 0.0)) continue;
    const auto r = linear_invert(from_matrix(h), f, 4);
    for (int n = 0; n < 4; ++n) REQUIRE((r.estimate[n] < 0.0) == (raw[n] < 0.0));
    CHECK(r.negative_count == (raw.array() < 0.0).count());
  }
}

TEST_CASE("MaxLik is never worse than a feasible deterministic estimate") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Eigen::MatrixXd h(7, 3);
    for (auto& v : h.reshaped()) v = u(rng);
    for (int n = 0; n < 3; ++n) h.col(n) /= h.col(n).sum();
    Eigen::VectorXd f(7);
    for (auto& v : f) v = u(rng);
    f /= f.sum();
    const auto kernel = from_matrix(h);
    const auto det = linear_invert(kernel, f, 3);
    if (det.negative_count > 0 || !det.k_defined()) continue;
    FitOptions o;
    o.tolerance = 1e-13;
    o.max_iterations = 200000;
    const auto ml = reconstruct(kernel, f, PhotonDistribution(uniform_simplex(3, trial), 1e-12), o);
    CHECK(ml.relative_entropy <= *det.relative_entropy + 1e-9);
    ++compared;
  }
  CHECK(compared > 5);
}

TEST_CASE("argument and rank checks") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3, 2);
  CHECK_THROWS_AS(linear_invert(from_matrix(h), Eigen::Vector3d(0.2, 0.3, 0.5), 2), NumericalError);
  h(0, 0) = 1.0;
  CHECK_THROWS_AS(linear_invert(from_matrix(h), Eigen::Vector3d(0.2, 0.3, 0.5), 3), InvalidArgument);
  CHECK_THROWS_AS(linear_invert(from_matrix(h), Eigen::Vector3d(0.2, 0.3, 0.5), 2, 0.0), InvalidArgument);
  CHECK_THROWS_AS(linear_invert(from_matrix(h), Eigen::Vector3d(0.2, 0.3, 0.5), 2, 1.0), InvalidArgument);
}

}  // TEST_SUITE
