#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace abm {

// Compensated (Kahan) accumulator.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

// Brent's method on a bracketing interval [a, b] with f(a)*f(b) <= 0.
// Stops when |f| <= value_tol or the interval collapses to machine width.
template <class F>
RootResult brent_root(F&& f, double a, double b, double fa, double fb,
                      double value_tol, int max_iter) {
  if (fa * fb > 0.0) throw std::invalid_argument("brent_root: interval does not bracket a root");
  double c = a, fc = fa;
  double d = b - a, e = d;
  RootResult out;
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 2.220446049250313e-16 * std::abs(b) + 0.5e-18;
    const double xm = 0.5 * (c - b);
    if (std::abs(fb) <= value_tol || std::abs(xm) <= tol1 || fb == 0.0) {
      out.x = b; out.fx = fb;
      return out;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d; d = p / q;
      } else {
        d = xm; e = d;
      }
    } else {
      d = xm; e = d;
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; d = b - a; e = d; }
  }
  out.x = b; out.fx = fb;
  return out;
}

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1] (QUADPACK dqk15 constants).
inline constexpr std::array<double, 8> kGkNodes = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

template <class F>
void gk15(F&& f, double a, double b, double& kronrod, double& err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double resk = kKronrodWeights[7] * f(mid);
  double resg = kGaussWeights[3] * f(mid);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGkNodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    resk += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) resg += kGaussWeights[i / 2] * fsum;
  }
  kronrod = resk * half;
  err = std::abs((resk - resg) * half);
}

template <class F>
double integrate_gk_rec(F&& f, double a, double b, double abs_tol, int depth) {
  double k, err;
  gk15(f, a, b, k, err);
  if (err <= abs_tol || depth >= 60) return k;
  const double mid = 0.5 * (a + b);
  return integrate_gk_rec(f, a, mid, 0.5 * abs_tol, depth + 1) +
         integrate_gk_rec(f, mid, b, 0.5 * abs_tol, depth + 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod quadrature of f over [a, b] to absolute tolerance.
template <class F>
double integrate_gk(F&& f, double a, double b, double abs_tol) {
  if (!(b >= a)) throw std::invalid_argument("integrate_gk: bad interval");
  if (a == b) return 0.0;
  return detail::integrate_gk_rec(f, a, b, abs_tol, 0);
}

// Eigenvalues of a symmetric 2x2 [[a, b], [b, c]], ascending.
inline std::array<double, 2> eigenvalues_sym2(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return {mean - rad, mean + rad};
}

// Eigenvalues of a symmetric 3x3, ascending (trigonometric closed form).
inline std::array<double, 3> eigenvalues_sym3(const std::array<std::array<double, 3>, 3>& m) {
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  const double tr = m[0][0] + m[1][1] + m[2][2];
  if (p1 == 0.0) {
    std::array<double, 3> d = {m[0][0], m[1][1], m[2][2]};
    std::sort(d.begin(), d.end());
    return d;
  }
  const double q = tr / 3.0;
  const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
                    (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  std::array<std::array<double, 3>, 3> b{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
  const double detb =
      b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
      b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
      b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(0.5 * detb, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * 3.141592653589793238463 / 3.0);
  return {e3, tr - e1 - e3, e1};
}

}  // namespace abm
