#include "abm/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "abm/errors.hpp"
#include "abm/numerics.hpp"

namespace abm {

const char* family_name(Family f) {
  switch (f) {
    case Family::Pareto: return "pareto";
    case Family::Frechet: return "frechet";
    case Family::HalfStudentT: return "half_student_t";
    case Family::StudentT: return "student_t";
    case Family::Ar1: return "ar1";
    case Family::Garch11: return "garch11";
    case Family::ScaleHet: return "scale_het";
  }
  return "?";
}

DgpSpec DgpSpec::pareto(double gamma) { return {.family = Family::Pareto, .gamma = gamma}; }
DgpSpec DgpSpec::frechet(double gamma) { return {.family = Family::Frechet, .gamma = gamma}; }
DgpSpec DgpSpec::half_student_t(double nu) {
  return {.family = Family::HalfStudentT, .nu = nu};
}
DgpSpec DgpSpec::student_t(double nu) { return {.family = Family::StudentT, .nu = nu}; }
DgpSpec DgpSpec::ar1(double phi, double nu, int burn_in) {
  DgpSpec s;
  s.family = Family::Ar1;
  s.phi = phi;
  s.nu = nu;
  s.burn_in = burn_in;
  return s;
}
DgpSpec DgpSpec::garch11(double l0, double l1, double l2, double nu, int burn_in) {
  DgpSpec s;
  s.family = Family::Garch11;
  s.lambda0 = l0;
  s.lambda1 = l1;
  s.lambda2 = l2;
  s.nu = nu;
  s.burn_in = burn_in;
  return s;
}
DgpSpec DgpSpec::scale_het(double r, double nu) {
  DgpSpec s;
  s.family = Family::ScaleHet;
  s.r = r;
  s.nu = nu;
  return s;
}

void DgpSpec::validate() const {
  switch (family) {
    case Family::Pareto:
    case Family::Frechet:
      if (!(gamma > 0.0)) throw std::invalid_argument("dgp field 'gamma': must be positive");
      return;
    case Family::HalfStudentT:
    case Family::StudentT:
      if (!(nu > 0.0)) throw std::invalid_argument("dgp field 'nu': must be positive");
      return;
    case Family::Ar1:
      if (!(nu > 0.0)) throw std::invalid_argument("dgp field 'nu': must be positive");
      if (!(std::abs(phi) < 1.0))
        throw std::invalid_argument("dgp field 'phi': must satisfy |phi| < 1");
      if (burn_in < 0) throw std::invalid_argument("dgp field 'burn_in': must be >= 0");
      return;
    case Family::Garch11:
      if (!(lambda0 > 0.0)) throw std::invalid_argument("dgp field 'lambda0': must be positive");
      if (lambda1 < 0.0) throw std::invalid_argument("dgp field 'lambda1': must be >= 0");
      if (lambda2 < 0.0) throw std::invalid_argument("dgp field 'lambda2': must be >= 0");
      if (!(lambda1 + lambda2 < 1.0))
        throw std::invalid_argument(
            "dgp fields 'lambda1'+'lambda2': must be < 1 (stationarity)");
      if (!(nu > 2.0))
        throw std::invalid_argument(
            "dgp field 'nu': must exceed 2 (unit-variance standardization)");
      if (burn_in < 0) throw std::invalid_argument("dgp field 'burn_in': must be >= 0");
      return;
    case Family::ScaleHet:
      if (!(r > 0.0)) throw std::invalid_argument("dgp field 'r': must be positive");
      if (!(nu > 0.0)) throw std::invalid_argument("dgp field 'nu': must be positive");
      return;
  }
  throw std::invalid_argument("dgp field 'family': unknown family");
}

double DgpSpec::true_gamma() const {
  validate();
  switch (family) {
    case Family::Pareto:
    case Family::Frechet: return gamma;
    case Family::HalfStudentT:
    case Family::StudentT:
    case Family::Ar1:
    case Family::ScaleHet: return 1.0 / nu;
    case Family::Garch11: return kesten_gamma(lambda1, lambda2, nu);
  }
  throw std::invalid_argument("dgp field 'family': unknown family");
}

double DgpSpec::rho() const {
  switch (family) {
    case Family::Frechet: return -1.0;
    case Family::Pareto: return -std::numeric_limits<double>::infinity();
    case Family::HalfStudentT:
    case Family::StudentT: return -2.0 / nu;
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

double DgpSpec::rho_prime() const {
  switch (family) {
    case Family::Frechet: return -std::numeric_limits<double>::infinity();
    case Family::Pareto: return -1.0;
    case Family::HalfStudentT:
    case Family::StudentT: return -2.0 / nu;
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

double pareto_quantile(double u, double gamma) {
  if (!(u > 0.0) || !(u < 1.0)) throw std::invalid_argument("pareto_quantile: u must lie in (0,1)");
  return std::pow(u, -gamma);
}

double frechet_quantile(double u, double gamma) {
  if (!(u > 0.0) || !(u < 1.0)) throw std::invalid_argument("frechet_quantile: u must lie in (0,1)");
  return std::pow(-std::log(u), -gamma);
}

std::vector<double> sample_iid(const DgpSpec& spec, std::size_t n, RngStream& rng) {
  spec.validate();
  std::vector<double> out(n);
  switch (spec.family) {
    case Family::Pareto:
      for (double& v : out) v = pareto_quantile(rng.uniform_open(), spec.gamma);
      return out;
    case Family::Frechet:
      for (double& v : out) v = frechet_quantile(rng.uniform_open(), spec.gamma);
      return out;
    case Family::HalfStudentT:
      for (double& v : out) v = std::abs(rng.student_t(spec.nu));
      return out;
    default:
      throw std::invalid_argument(
          "sample_iid: family '" + std::string(family_name(spec.family)) +
          "' is not an i.i.d. design; use its series generator");
  }
}

std::vector<double> ar1_filter(double phi, std::span<const double> innovations) {
  std::vector<double> x(innovations.size());
  if (x.empty()) return x;
  x[0] = innovations[0];
  for (std::size_t t = 1; t < x.size(); ++t) x[t] = phi * x[t - 1] + innovations[t];
  return x;
}

std::vector<double> garch_filter(double l0, double l1, double l2,
                                 std::span<const double> innovations) {
  std::vector<double> x(innovations.size());
  if (x.empty()) return x;
  double sigma2 = l0 / (1.0 - l1 - l2);  // stationary variance start
  x[0] = std::sqrt(sigma2) * innovations[0];
  for (std::size_t t = 1; t < x.size(); ++t) {
    sigma2 = l0 + l1 * x[t - 1] * x[t - 1] + l2 * sigma2;
    x[t] = std::sqrt(sigma2) * innovations[t];
  }
  return x;
}

std::vector<double> ar1_series(double phi, std::size_t n, int burn_in, double nu,
                               RngStream& rng) {
  DgpSpec::ar1(phi, nu, burn_in).validate();
  const std::size_t total = n + static_cast<std::size_t>(burn_in);
  std::vector<double> eps(total);
  for (double& e : eps) e = rng.student_t(nu);
  std::vector<double> x = ar1_filter(phi, eps);
  return {x.end() - static_cast<std::ptrdiff_t>(n), x.end()};
}

std::vector<double> garch_series(double l0, double l1, double l2, double nu,
                                 std::size_t n, int burn_in, RngStream& rng) {
  DgpSpec::garch11(l0, l1, l2, nu, burn_in).validate();
  const double std_factor = std::sqrt((nu - 2.0) / nu);  // Var(t_nu) = nu/(nu-2)
  const std::size_t total = n + static_cast<std::size_t>(burn_in);
  std::vector<double> eps(total);
  for (double& e : eps) e = std_factor * rng.student_t(nu);
  std::vector<double> x = garch_filter(l0, l1, l2, eps);
  return {x.end() - static_cast<std::ptrdiff_t>(n), x.end()};
}

std::vector<double> scale_het_series(double r, double nu, std::size_t n, RngStream& rng) {
  DgpSpec::scale_het(r, nu).validate();
  if (n % 2 != 0) throw std::invalid_argument("scale_het_series: n must be even");
  std::vector<double> x(n);
  for (double& v : x) v = std::abs(rng.student_t(nu));
  for (std::size_t t = n / 2; t < n; ++t) x[t] *= r;
  return x;
}

std::vector<double> draw_series(const DgpSpec& spec, std::size_t n, RngStream& rng) {
  spec.validate();
  switch (spec.family) {
    case Family::Pareto:
    case Family::Frechet:
    case Family::HalfStudentT: return sample_iid(spec, n, rng);
    case Family::StudentT: {
      std::vector<double> out(n);
      for (double& v : out) v = rng.student_t(spec.nu);
      return out;
    }
    case Family::Ar1: return ar1_series(spec.phi, n, spec.burn_in, spec.nu, rng);
    case Family::Garch11:
      return garch_series(spec.lambda0, spec.lambda1, spec.lambda2, spec.nu, n,
                          spec.burn_in, rng);
    case Family::ScaleHet: return scale_het_series(spec.r, spec.nu, n, rng);
  }
  throw std::invalid_argument("draw_series: unknown family");
}

namespace {

// E g(eps^2) for unit-variance standardized t(nu), computed as an exact
// integral over theta in [0, pi/2] after substituting x = sqrt(nu) tan(theta):
//   E g = 2 C_nu sqrt(nu) Int g(s nu tan^2 t) cos^(nu-1) t dt,  s = (nu-2)/nu,
// where C_nu is the t density normalizer. The Kronrod nodes are interior, so
// the mild endpoint behaviour at theta = pi/2 is never evaluated directly.
template <class G>
double standardized_t_square_expectation(G&& g, double nu, double abs_tol) {
  const double c_nu = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                      std::sqrt(nu * 3.141592653589793238463);
  const double s = (nu - 2.0) / nu;
  auto integrand = [&](double theta) {
    const double tt = std::tan(theta);
    return g(s * nu * tt * tt) * std::pow(std::cos(theta), nu - 1.0);
  };
  const double scale = 2.0 * c_nu * std::sqrt(nu);
  return scale * integrate_gk(integrand, 0.0, 0.5 * 3.141592653589793238463,
                              abs_tol / scale);
}

}  // namespace

double kesten_gamma(double l1, double l2, double nu) {
  if (l1 < 0.0) throw std::invalid_argument("kesten_gamma: l1 must be >= 0");
  if (l2 < 0.0 || l2 >= 1.0) throw std::invalid_argument("kesten_gamma: l2 must lie in [0,1)");
  if (!(nu > 2.0))
    throw std::invalid_argument("kesten_gamma: nu must exceed 2 (finite innovation variance)");
  if (l1 == 0.0)
    throw NoKestenIndexError("kesten_gamma: l1 = 0 gives E(l2)^kappa = l2^kappa < 1, no root");

  constexpr double kQuadTol = 1e-9;
  constexpr double kRootTol = 1e-8;
  const double kappa_cap = 0.5 * nu - 1e-6;

  const double mean_log = standardized_t_square_expectation(
      [&](double e2) { return std::log(l1 * e2 + l2); }, nu, kQuadTol);
  if (!(mean_log < 0.0))
    throw NoKestenIndexError(
        "kesten_gamma: E log(l1 eps^2 + l2) = " + std::to_string(mean_log) +
        " >= 0; squared process is not contracting");

  auto h = [&](double kappa) {
    return standardized_t_square_expectation(
               [&](double e2) { return std::pow(l1 * e2 + l2, kappa); }, nu, kQuadTol) -
           1.0;
  };

  // h(0) = 0 with negative slope (mean_log < 0) and h is convex, so scan
  // upward for the first sign change, then bisect inside it.
  double lo = 1e-6, hi = 0.0;
  double h_lo = h(lo);
  bool bracketed = false;
  for (double kappa = 0.05; kappa < kappa_cap; kappa += 0.05) {
    const double h_k = h(kappa);
    if (h_lo < 0.0 && h_k >= 0.0) {
      hi = kappa;
      bracketed = true;
      break;
    }
    lo = kappa;
    h_lo = h_k;
  }
  if (!bracketed) {
    const double h_cap = h(kappa_cap);
    if (h_lo < 0.0 && h_cap >= 0.0) {
      hi = kappa_cap;
      bracketed = true;
    }
  }
  if (!bracketed)
    throw NoKestenIndexError("kesten_gamma: no sign change of E(l1 eps^2 + l2)^kappa - 1 on (0, nu/2)");

  while (hi - lo > kRootTol) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double kappa = 0.5 * (lo + hi);
  return 1.0 / (2.0 * kappa);
}

}  // namespace abm
