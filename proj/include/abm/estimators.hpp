#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace abm {

enum class Method { Abm, DisjointBm, SlidingBm, Hill };

const char* method_name(Method m);                 // "abm", "bm", "sliding", "hill"
std::optional<Method> method_from_name(const std::string& name);

struct SolverInfo {
  int iterations = 0;
  std::pair<double, double> bracket = {0.0, 0.0};
  double residual = 0.0;  // score value at the returned root
};

struct EstimateResult {
  Method method = Method::Abm;
  double gamma_hat = 0.0;
  std::optional<double> sigma_hat;       // absent for Hill
  std::optional<std::int64_t> block_size;  // m; absent for Hill
  double k_effective = 0.0;              // n/m (real), floor(n/m), or k
  SolverInfo solver;
};

// Profile score of the weighted two-parameter Frechet likelihood:
//   psi(g) = g + sum(w x^(-1/g) log x)/sum(w x^(-1/g)) - sum(w log x).
// gamma_hat is its unique zero. Values must be positive and finite; weights
// nonnegative, finite, not all zero. If every value carrying positive weight
// is identical the score equals gamma exactly (no root anywhere).
double psi(double gamma, std::span<const double> values, std::span<const double> weights);

struct FitOptions {
  double tol = 1e-10;                                    // |psi| at the root
  std::optional<std::pair<double, double>> bracket_hint;  // initial bracket
};

struct WmlFit {
  double gamma_hat = 0.0;
  double sigma_hat = 0.0;
  SolverInfo solver;
};

// Solves psi(gamma) = 0 by bracketing (default [0.05, 2], expanded outward by
// factors of 4 within [1e-6, 1e3]) plus Brent iteration, then recovers the
// scale sigma_hat = (sum w x^(-1/gamma_hat))^(-gamma_hat).
// Throws NoUniqueMaximizerError / BracketingFailedError on degenerate input.
WmlFit fit_frechet_wml(std::span<const double> values, std::span<const double> weights,
                       const FitOptions& options = {});

// All-block-maxima estimator: truncates the sample at c, sorts descending,
// and fits the weighted Frechet likelihood on the top n-m+1 order statistics
// with the binomial weights. k_effective = n/m as a real number.
EstimateResult abm_estimate(std::span<const double> raw, std::int64_t m, double c,
                            double tol = 1e-10);

// Classical disjoint block maxima: floor(n/m) complete blocks taken from the
// front of the sample in original order (trailing remainder discarded), block
// maxima truncated at c, equal weights. Requires n >= 2m.
EstimateResult disjoint_bm_estimate(std::span<const double> raw, std::int64_t m, double c,
                                    double tol = 1e-10);

// Sliding block maxima: all n-m+1 window maxima (O(n) monotone deque),
// truncated at c, equal weights. Requires n > m.
EstimateResult sliding_bm_estimate(std::span<const double> raw, std::int64_t m, double c,
                                   double tol = 1e-10);

// Hill estimator on the top k order statistics:
//   gamma_hat = (1/k) sum_{i=1..k} log X_{n-i+1:n} - log X_{n-k:n}.
// Requires 1 <= k <= n-1 and X_{n-k:n} > 0. No scale estimate.
EstimateResult hill_estimate(std::span<const double> raw, std::int64_t k);

struct SweepRow {
  std::int64_t k = 0;
  std::optional<EstimateResult> result;  // empty iff error is set
  std::string error;
};

// Runs one estimator across a grid of k values, mapping k -> m = floor(n/k)
// for the block methods (m >= 2 enforced) and using k directly for Hill.
// Failures are captured per row, never aborting the sweep. k_grid entries
// must be >= 1 and distinct.
std::vector<SweepRow> k_sweep(std::span<const double> raw, Method method,
                              std::span<const std::int64_t> k_grid, double c,
                              double tol = 1e-10);

}  // namespace abm
