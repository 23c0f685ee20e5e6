#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "abm/distributions.hpp"
#include "abm/errors.hpp"
#include "abm/estimators.hpp"
#include "abm/rng.hpp"
#include "abm/weights.hpp"

using abm::abm_estimate;
using abm::disjoint_bm_estimate;
using abm::hill_estimate;
using abm::Method;
using abm::psi;
using abm::sliding_bm_estimate;

namespace {

// Literal transcription of the score, no stabilization: used as the slow
// oracle. Fine for the small, moderate-magnitude samples below.
double psi_naive(double g, const std::vector<double>& x, const std::vector<double>& w) {
  long double num = 0, den = 0, wlog = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double p = std::pow((long double)x[i], (long double)(-1.0 / g));
    num += w[i] * p * std::log((long double)x[i]);
    den += w[i] * p;
    wlog += w[i] * std::log((long double)x[i]);
  }
  return double(g + num / den - wlog);
}

// Scan-and-bisect root of psi_naive: independent of the production solver.
double root_oracle(const std::vector<double>& x, const std::vector<double>& w) {
  double lo = 1e-4, hi = 1e-4;
  double flo = psi_naive(lo, x, w);
  REQUIRE(flo < 0.0);
  for (;;) {
    hi *= 1.25;
    REQUIRE(hi < 1e6);
    if (psi_naive(hi, x, w) >= 0.0) break;
    lo = hi;
    flo = psi_naive(lo, x, w);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi_naive(mid, x, w) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("score matches a hand evaluation") {
  const std::vector<double> x = {std::exp(2.0), std::exp(1.0)};
  const std::vector<double> w = {0.5, 0.5};
  // 1 + (2 e^-2 + e^-1)/(e^-2 + e^-1) - 3/2
  CHECK(psi(1.0, x, w) == doctest::Approx(0.7689414213699952).epsilon(1e-14));
}

TEST_CASE("score on identical observations equals gamma") {
  const std::vector<double> x = {3.7, 3.7, 3.7};
  const std::vector<double> w = {0.2, 0.5, 0.3};
  for (double g : {0.1, 1.0, 17.0}) CHECK(psi(g, x, w) == g);
}

TEST_CASE("score input validation") {
  const std::vector<double> x = {2.0, 1.0};
  const std::vector<double> w = {0.5, 0.5};
  const std::vector<double> empty;
  CHECK_THROWS_AS(psi(0.0, x, w), std::invalid_argument);
  CHECK_THROWS_AS(psi(-1.0, x, w), std::invalid_argument);
  CHECK_THROWS_AS(psi(1.0, std::vector<double>{2.0, -1.0}, w), std::invalid_argument);
  CHECK_THROWS_AS(psi(1.0, std::vector<double>{2.0, 0.0}, w), std::invalid_argument);
  CHECK_THROWS_AS(psi(1.0, x, std::vector<double>{0.5, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(psi(1.0, x, std::vector<double>{0.5}), std::invalid_argument);
  CHECK_THROWS_AS(psi(1.0, empty, empty), std::invalid_argument);
  CHECK_THROWS_AS(psi(1.0, x, std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("fitted root agrees with the brute-force oracle") {
  abm::RngStream rng(314, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + std::size_t(rng.uniform() * 30);
    const std::size_t m = 2 + std::size_t(rng.uniform() * 4);
    std::vector<double> raw(n);
    const double g_true = 0.3 + 1.2 * rng.uniform();
    for (double& v : raw) v = abm::pareto_quantile(rng.uniform_open(), g_true);

    const abm::EstimateResult fit = abm_estimate(raw, std::int64_t(m), 1e-3, 1e-12);

    std::vector<double> x(raw);
    std::sort(x.begin(), x.end(), std::greater<>());
    x.resize(n - m + 1);
    const std::vector<double> w = abm::abm_weights(std::int64_t(n), std::int64_t(m)).values;
    const double oracle = root_oracle(x, w);
    CHECK(std::abs(fit.gamma_hat - oracle) <= 1e-6);
    CHECK(std::abs(psi(fit.gamma_hat, x, w)) <= 1e-10);
  }
}

TEST_CASE("abm fit is invariant under sample permutations, bit for bit") {
  abm::RngStream rng(99, 0);
  std::vector<double> raw(400);
  for (double& v : raw) v = abm::pareto_quantile(rng.uniform_open(), 0.8);
  const abm::EstimateResult base = abm_estimate(raw, 25, 1e-3);

  std::mt19937_64 shuf(7);
  std::vector<double> perm(raw);
  for (int rep = 0; rep < 20; ++rep) {
    std::shuffle(perm.begin(), perm.end(), shuf);
    const abm::EstimateResult again = abm_estimate(perm, 25, 1e-3);
    CHECK(again.gamma_hat == base.gamma_hat);
    CHECK(*again.sigma_hat == *base.sigma_hat);
  }
}

TEST_CASE("scaling the data rescales sigma and leaves gamma put") {
  abm::RngStream rng(100, 0);
  std::vector<double> raw(300);
  for (double& v : raw) v = abm::frechet_quantile(rng.uniform_open(), 0.6);

  const double c = 1e-3;
  const abm::EstimateResult base = abm_estimate(raw, 20, c);
  for (double s : {0.01, 3.0, 1e4}) {
    std::vector<double> scaled(raw);
    for (double& v : scaled) v *= s;
    const abm::EstimateResult fit = abm_estimate(scaled, 20, s * c);
    CHECK(fit.gamma_hat == doctest::Approx(base.gamma_hat).epsilon(1e-8));
    CHECK(*fit.sigma_hat == doctest::Approx(s * *base.sigma_hat).epsilon(1e-8));
  }
}

TEST_CASE("sigma satisfies the profile stationarity identity") {
  // At the optimum, sum_i w_i (x_i/sigma)^(-1/gamma) = 1.
  abm::RngStream rng(101, 0);
  std::vector<double> raw(250);
  for (double& v : raw) v = abm::pareto_quantile(rng.uniform_open(), 1.2);
  const std::int64_t m = 10;
  const abm::EstimateResult fit = abm_estimate(raw, m, 1e-3);

  std::vector<double> x(raw);
  std::sort(x.begin(), x.end(), std::greater<>());
  x.resize(raw.size() - std::size_t(m) + 1);
  const std::vector<double> w = abm::abm_weights(250, m).values;
  long double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    total += w[i] * std::pow((long double)(x[i] / *fit.sigma_hat),
                             (long double)(-1.0 / fit.gamma_hat));
  CHECK(double(total) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("solver residual respects the requested tolerance") {
  abm::RngStream rng(55, 0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> raw(200);
    for (double& v : raw) v = std::abs(rng.student_t(3.0));
    const abm::EstimateResult fit = abm_estimate(raw, 8, 1e-3, 1e-10);
    CHECK(std::abs(fit.solver.residual) <= 1e-10);
    CHECK(fit.gamma_hat > 0.0);
    CHECK(*fit.sigma_hat > 0.0);
  }
}

TEST_CASE("truncation floor rescues nonpositive observations") {
  std::vector<double> raw = {-2.0, 0.0, 5.0, 7.0, 1.0, 3.0, -1.0, 4.0, 2.0, 6.0};
  const abm::EstimateResult fit = abm_estimate(raw, 2, 1e-3);
  CHECK(fit.gamma_hat > 0.0);

  // Everything at or below the floor collapses to one atom: no maximizer.
  std::vector<double> below(8, -1.0);
  CHECK_THROWS_AS(abm_estimate(below, 2, 1e-3), abm::NoUniqueMaximizerError);
}

TEST_CASE("degenerate inputs raise the documented errors") {
  std::vector<double> same(30, 4.2);
  CHECK_THROWS_AS(abm_estimate(same, 3, 1e-3), abm::NoUniqueMaximizerError);

  std::vector<double> raw = {1.0, 2.0, 3.0, 4.0};
  CHECK_THROWS_AS(abm_estimate(raw, 1, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(abm_estimate(raw, 5, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(abm_estimate(raw, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(abm_estimate(std::vector<double>{}, 2, 1e-3), std::invalid_argument);
  std::vector<double> with_nan = {1.0, std::nan(""), 2.0, 3.0};
  CHECK_THROWS_AS(abm_estimate(with_nan, 2, 1e-3), std::invalid_argument);

  const abm::BracketingFailedError carrier("msg", -0.25, -0.125);
  CHECK(carrier.score_low() == -0.25);
  CHECK(carrier.score_high() == -0.125);
}

TEST_CASE("hill estimator on a geometric ladder") {
  const std::vector<double> x = {std::exp(1.0), std::exp(2.0), std::exp(3.0), std::exp(4.0)};
  CHECK(hill_estimate(x, 2).gamma_hat == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(hill_estimate(x, 3).gamma_hat == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(!hill_estimate(x, 2).sigma_hat.has_value());
  CHECK(hill_estimate(x, 2).k_effective == 2.0);

  CHECK_THROWS_AS(hill_estimate(x, 0), std::invalid_argument);
  CHECK_THROWS_AS(hill_estimate(x, 4), std::invalid_argument);
  const std::vector<double> with_zero = {0.0, 1.0, 2.0, 3.0};
  CHECK_THROWS_AS(hill_estimate(with_zero, 3), std::invalid_argument);
  CHECK(hill_estimate(with_zero, 2).gamma_hat > 0.0);  // pivot is 1.0, fine
}

TEST_CASE("hill is location-free in log scale") {
  abm::RngStream rng(77, 0);
  std::vector<double> raw(500);
  for (double& v : raw) v = abm::pareto_quantile(rng.uniform_open(), 0.5);
  const double base = hill_estimate(raw, 50).gamma_hat;
  for (double& v : raw) v *= 7.5;  // scale invariance
  CHECK(hill_estimate(raw, 50).gamma_hat == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("disjoint blocks are taken from the front in original order") {
  // n = 7, m = 2: blocks (5,1), (2,9), (3,3); the trailing 8 is discarded.
  const std::vector<double> raw = {5.0, 1.0, 2.0, 9.0, 3.0, 3.0, 8.0};
  const std::vector<double> head(raw.begin(), raw.begin() + 6);
  const abm::EstimateResult full = disjoint_bm_estimate(raw, 2, 1e-3);
  const abm::EstimateResult trimmed = disjoint_bm_estimate(head, 2, 1e-3);
  CHECK(full.gamma_hat == trimmed.gamma_hat);
  CHECK(full.k_effective == 3.0);

  // Reordering the sample moves values across block boundaries and changes
  // the maxima multiset, so the estimate moves too (unlike ABM).
  const std::vector<double> reordered = {5.0, 9.0, 1.0, 2.0, 3.0, 3.0, 8.0};
  const abm::EstimateResult perm = disjoint_bm_estimate(reordered, 2, 1e-3);
  CHECK(perm.gamma_hat != full.gamma_hat);

  CHECK_THROWS_AS(disjoint_bm_estimate(head, 4, 1e-3), std::invalid_argument);  // n < 2m
}

TEST_CASE("sliding maxima agree with the quadratic-time definition") {
  abm::RngStream rng(31, 0);
  std::vector<double> raw(200);
  for (double& v : raw) v = rng.student_t(3.0);

  for (std::int64_t m : {2, 7, 50}) {
    // naive windows
    std::vector<double> want;
    for (std::size_t t = 0; t + std::size_t(m) <= raw.size(); ++t)
      want.push_back(std::max(1e-3, *std::max_element(raw.begin() + t, raw.begin() + t + m)));
    std::sort(want.begin(), want.end(), std::greater<>());

    const abm::EstimateResult fast = sliding_bm_estimate(raw, m, 1e-3);
    // Equal sorted maxima imply the identical equal-weight fit input, so
    // compare through the fitted values of an explicit refit.
    const std::vector<double> w(want.size(), 1.0 / double(want.size()));
    const abm::WmlFit refit = abm::fit_frechet_wml(want, w);
    CHECK(fast.gamma_hat == refit.gamma_hat);
    CHECK(fast.k_effective == double(raw.size()) / double(m));
  }

  CHECK_THROWS_AS(sliding_bm_estimate(raw, 200, 1e-3), std::invalid_argument);
}

TEST_CASE("k sweep maps k to block size and captures failures per row") {
  abm::RngStream rng(123, 0);
  std::vector<double> raw(100);
  for (double& v : raw) v = abm::pareto_quantile(rng.uniform_open(), 1.0);

  const std::vector<std::int64_t> grid = {5, 10, 60};  // k=60 gives m=1: row error
  const auto rows = abm::k_sweep(raw, Method::Abm, grid, 1e-3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].result.has_value());
  CHECK(rows[0].result->gamma_hat == abm_estimate(raw, 100 / 5, 1e-3).gamma_hat);
  CHECK(rows[1].result.has_value());
  CHECK(!rows[2].result.has_value());
  CHECK(rows[2].error.find("block too short") != std::string::npos);

  // Hill path uses k directly.
  const auto hill_rows = abm::k_sweep(raw, Method::Hill, grid, 1e-3);
  CHECK(hill_rows[2].result->gamma_hat == hill_estimate(raw, 60).gamma_hat);

  CHECK_THROWS_AS(abm::k_sweep(raw, Method::Abm, std::vector<std::int64_t>{}, 1e-3),
                  std::invalid_argument);
  CHECK_THROWS_AS(abm::k_sweep(raw, Method::Abm, std::vector<std::int64_t>{5, 5}, 1e-3),
                  std::invalid_argument);
  CHECK_THROWS_AS(abm::k_sweep(raw, Method::Abm, std::vector<std::int64_t>{0}, 1e-3),
                  std::invalid_argument);
}

TEST_CASE("method names round-trip") {
  for (Method m : {Method::Abm, Method::DisjointBm, Method::SlidingBm, Method::Hill})
    CHECK(abm::method_from_name(abm::method_name(m)) == m);
  CHECK(!abm::method_from_name("nope").has_value());
}
