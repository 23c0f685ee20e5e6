#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abm/rng.hpp"

namespace abm {

enum class Family { Pareto, Frechet, HalfStudentT, StudentT, Ar1, Garch11, ScaleHet };

const char* family_name(Family f);

// Data-generating process. A flat parameter record rather than a class
// hierarchy: each family reads only its own fields, validate() checks them.
//
// Families and their extreme value index:
//   Pareto(gamma)        survival x^(-1/gamma) on [1, inf)     -> gamma
//   Frechet(gamma)       cdf exp(-x^(-1/gamma))                -> gamma
//   HalfStudentT(nu)     |T_nu|                                -> 1/nu
//   StudentT(nu)         signed T_nu (innovation family)       -> 1/nu
//   Ar1(phi, nu)         X_t = phi X_{t-1} + T_nu              -> 1/nu
//   Garch11(l0,l1,l2,nu) X_t = sigma_t eps_t, unit-variance
//                        standardized t(nu) innovations        -> kesten_gamma
//   ScaleHet(r, nu)      |T_nu|, second half scaled by r       -> 1/nu
struct DgpSpec {
  Family family = Family::Pareto;
  double gamma = 0.0;    // Pareto, Frechet
  double nu = 0.0;       // all Student-t based families
  double phi = 0.0;      // Ar1
  double lambda0 = 0.0;  // Garch11
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double r = 0.0;        // ScaleHet
  int burn_in = 0;       // Ar1 / Garch11 recursion warmup length

  static DgpSpec pareto(double gamma);
  static DgpSpec frechet(double gamma);
  static DgpSpec half_student_t(double nu);
  static DgpSpec student_t(double nu);
  static DgpSpec ar1(double phi, double nu, int burn_in = 100);
  static DgpSpec garch11(double l0, double l1, double l2, double nu, int burn_in = 100);
  static DgpSpec scale_het(double r, double nu);

  void validate() const;  // throws std::invalid_argument naming the field
  double true_gamma() const;

  // Second-order parameters (rho, rho') where the theory states them:
  // Frechet (-1, -inf), Pareto (-inf, -1), Student-t (-2/nu, -2/nu).
  // NaN where not applicable.
  double rho() const;
  double rho_prime() const;
};

// Inverse-transform quantiles (u in (0, 1)).
double pareto_quantile(double u, double gamma);   // u^(-gamma)
double frechet_quantile(double u, double gamma);  // (-log u)^(-gamma)

// i.i.d. sampling for the Pareto / Frechet / HalfStudentT families only;
// the serial families must go through their series generators.
std::vector<double> sample_iid(const DgpSpec& spec, std::size_t n, RngStream& rng);

// Deterministic recursions on a given innovation sequence; exposed so tests
// can drive them with hand-picked inputs.
std::vector<double> ar1_filter(double phi, std::span<const double> innovations);
std::vector<double> garch_filter(double l0, double l1, double l2,
                                 std::span<const double> innovations);

// X_1 = eps_1, X_t = phi X_{t-1} + eps_t with signed Student-t(nu) noise;
// generates n + burn_in values and returns the last n.
std::vector<double> ar1_series(double phi, std::size_t n, int burn_in, double nu,
                               RngStream& rng);

// GARCH(1,1): sigma_1^2 = l0/(1-l1-l2), sigma_t^2 = l0 + l1 X_{t-1}^2
// + l2 sigma_{t-1}^2, X_t = sigma_t eps_t with unit-variance standardized
// Student-t(nu) innovations (nu > 2). Returns the last n of n + burn_in.
std::vector<double> garch_series(double l0, double l1, double l2, double nu,
                                 std::size_t n, int burn_in, RngStream& rng);

// |t(nu)| draws with the final n/2 values multiplied by r. n must be even.
std::vector<double> scale_het_series(double r, double nu, std::size_t n, RngStream& rng);

// Dispatches to the appropriate generator for any family.
std::vector<double> draw_series(const DgpSpec& spec, std::size_t n, RngStream& rng);

// Tail index of the GARCH(1,1) process: gamma = 1/(2 kappa) where kappa
// solves E(l1 eps^2 + l2)^kappa = 1 over (0, nu/2) for unit-variance
// standardized t(nu) innovations. Bisection to 1e-8 with the moment evaluated
// by adaptive Gauss-Kronrod quadrature (abs tol 1e-9) of the exact integral
// compactified by x = sqrt(nu) tan(theta). Throws NoKestenIndexError when no
// root exists (e.g. l1 = 0, or E log(l1 eps^2 + l2) >= 0).
double kesten_gamma(double l1, double l2, double nu);

}  // namespace abm
