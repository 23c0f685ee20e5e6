#pragma once

#include <array>
#include <cstdint>

#include "abm/rng.hpp"

namespace abm {

// Euler-Mascheroni constant, 20 significant digits.
inline constexpr double kEulerMascheroni = 0.57721566490153286061;

using Mat2x2 = std::array<std::array<double, 2>, 2>;
using Mat2x3 = std::array<std::array<double, 3>, 2>;
using Mat3x3 = std::array<std::array<double, 3>, 3>;

// Gamma''(2) = (1 - tau)^2 + pi^2/6 - 1 (from Gamma'' = Gamma (psi^2 + psi')).
double gamma_second_derivative_at_two();

// Jacobian-style matrix M(gamma) mapping the three limiting sample moments to
// the parameter errors (1/gamma_hat - 1/gamma, sigma_hat/sigma - 1):
//   M = (6/pi^2) [ [gamma^-2, gamma^-1 (1-tau), -gamma^-2],
//                  [tau - 1, -gamma (Gamma''(2)+1), 1 - tau] ].
Mat2x3 m_matrix(double gamma);

// Limiting covariance Sigma(gamma) of the three weighted empirical moments.
// Symmetric positive semidefinite; Sigma[1][1] = 1/2 exactly and
// Sigma[2][2] = 2 gamma^2 log 2.
Mat3x3 sigma_matrix(double gamma);

// M Sigma M^T: asymptotic covariance of (1/gamma_hat - 1/gamma,
// sigma_hat/sigma - 1) scaled by k.
Mat2x2 limit_covariance(double gamma);

// The ABM variance constant a: asymptotic variance of gamma_hat is
// gamma^2 a / k. Via the delta method a = gamma^2 * limit_covariance[0][0]
// (Var(gamma_hat) ~ gamma^4 Var(1/gamma_hat), hence the extra gamma^2 on top
// of gamma^2 a). Dimensionless: independent of gamma. Approximately 0.3927,
// versus 0.494 (sliding blocks), 0.608 (disjoint blocks), 1 (Hill).
double abm_variance_constant(double gamma);

struct AsymptoticMatrices {
  double gamma = 0.0;
  Mat2x3 m;
  Mat3x3 sigma;
  Mat2x2 limit_cov;
  double variance_constant_a = 0.0;
};

AsymptoticMatrices asymptotic_matrices(double gamma);

// Monte Carlo cross-check of Sigma: with (U, S) i.i.d. standard exponential
// pairs, Sigma[i][j] = E g_i(U) g_j(S) (U ^ S) for
//   g1(u) = gamma (1 + log u), g2(u) = -1, g3(u) = gamma / u.
// Off-diagonal entries are symmetrized by averaging the (i,j) and (j,i)
// products draw by draw. `standard_error` holds the entrywise standard error
// of the mean. Chunked deterministically: the result is identical for any
// thread count given the same stream.
struct McCovarianceCheck {
  Mat3x3 estimate{};
  Mat3x3 standard_error{};
  std::int64_t reps = 0;
};

McCovarianceCheck covariance_mc_check(double gamma, std::int64_t reps,
                                      const RngStream& stream, int threads = 0);

}  // namespace abm
