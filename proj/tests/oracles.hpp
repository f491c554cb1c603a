#pragma once

// Independent reference computations used only by the tests. None of these
// share code paths with the library.

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Dense>

namespace pnrecon::oracle {

using Big = boost::multiprecision::cpp_bin_float_100;

/// Phi_k(x) = exp(-x^2) H_k(x)^2 / (2^k k! sqrt(pi)) with H_k summed from its
/// explicit coefficients k! sum_m (-1)^m (2x)^(k-2m) / (m! (k-2m)!) in
/// 100-digit arithmetic.
inline double oscillator_pdf(int k, double x_in) {
  const Big x = x_in;
  Big fact_k = 1;
  for (int i = 2; i <= k; ++i) fact_k *= i;
  Big hermite = 0;
  for (int m = 0; 2 * m <= k; ++m) {
    Big fm = 1, fr = 1;
    for (int i = 2; i <= m; ++i) fm *= i;
    for (int i = 2; i <= k - 2 * m; ++i) fr *= i;
    Big term = pow(2 * x, k - 2 * m) / (fm * fr);
    hermite += (m % 2 == 0) ? term : Big(-term);
  }
  hermite *= fact_k;
  const Big value = exp(-x * x) * hermite * hermite /
                    (pow(Big(2), k) * fact_k * sqrt(boost::math::constants::pi<Big>()));
  return static_cast<double>(value);
}

/// C(n,k) eta^k (1-eta)^(n-k) through log-gamma.
inline double binomial_weight(int n, int k, double eta) {
  const double log_w = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                       k * std::log(eta) + (n - k) * std::log(1.0 - eta);
  return std::exp(log_w);
}

/// Best sum_i f_i ln (H p)_i over a step-`step` lattice of the 2-simplex.
inline double best_loglik_two_levels(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                                     double step) {
  double best = -INFINITY;
  const auto n = static_cast<long>(std::llround(1.0 / step));
  for (long j = 0; j <= n; ++j) {
    const double p0 = static_cast<double>(j) / static_cast<double>(n);
    Eigen::Vector2d p(p0, 1.0 - p0);
    const Eigen::VectorXd q = h * p;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      if (f[i] > 0.0) ll += f[i] * std::log(q[i]);
    }
    if (ll > best) best = ll;
  }
  return best;
}

/// Exact quadrature second moment <x^2> = 1/2 + eta * <n> for a phase-averaged
/// state with mean photon number <n>.
inline double second_moment(double eta, double mean_n) { return 0.5 + eta * mean_n; }

}  // namespace pnrecon::oracle
