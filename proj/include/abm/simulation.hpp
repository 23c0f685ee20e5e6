#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abm/distributions.hpp"
#include "abm/estimators.hpp"

namespace abm {

// How k is chosen per sample size: an explicit grid, or k = round(n^l).
enum class KRule { Explicit, CubeRoot, SqrtN, TwoThirds };

const char* k_rule_name(KRule r);  // "explicit", "n^1/3", "n^1/2", "n^2/3"
std::optional<KRule> k_rule_from_name(const std::string& name);
double k_rule_exponent(KRule r);   // 1/3, 1/2, 2/3 (throws for Explicit)

struct ExperimentConfig {
  std::string name = "custom";
  DgpSpec dgp;
  std::vector<std::int64_t> n_grid;
  std::vector<std::int64_t> k_grid;  // used when k_rule == Explicit
  KRule k_rule = KRule::Explicit;
  std::vector<Method> methods;
  std::int64_t reps = 100;
  double c = 1e-3;
  double tol = 1e-10;
  std::uint64_t base_seed = 42;

  // k values evaluated at sample size n (the grid, or the single rule value).
  std::vector<std::int64_t> ks_for(std::int64_t n) const;

  // Throws std::invalid_argument naming the offending field; checks among
  // other things that every (n, k) pair gives m = floor(n/k) >= 2 for the
  // block methods.
  void validate() const;
};

// Monte Carlo summary for one (method, n, k) cell. Replicate r of the
// experiment draws one series of length max(n_grid) from the stream with id
// base_seed XOR r; every cell sees that same series (common random numbers),
// each n using the length-n prefix. Failed fits are excluded from the moments
// and counted; a cell with more than 50% failures is flagged invalid.
struct McCell {
  Method method = Method::Abm;
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::int64_t m = 0;  // 0 for Hill
  double bias = 0.0;
  double variance = 0.0;  // population variance (divide by count)
  double mse = 0.0;       // equals bias^2 + variance up to rounding
  double implied_asym_var = 0.0;  // k * variance / true_gamma^2
  std::int64_t reps_succeeded = 0;
  std::int64_t reps_failed = 0;
  bool valid = false;
};

struct McSummary {
  ExperimentConfig config;
  double true_gamma = 0.0;
  std::vector<McCell> cells;
};

McSummary run_experiment(const ExperimentConfig& config, int threads = 0);

// Implied-asymptotic-variance experiment: positive-half Student-t(2) data,
// k = round(n^l), ABM fit per replicate, reporting k * Var(gamma_hat) /
// gamma^2 per sample size. By default each replicate draws one series of
// length max(n_grid) and the smaller n reuse its prefixes; fresh_samples
// draws an independent series per (replicate, n) instead.
struct ImpliedVarRow {
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::int64_t m = 0;
  double implied_asym_var = 0.0;
  std::int64_t reps_succeeded = 0;
  std::int64_t reps_failed = 0;
};

std::vector<ImpliedVarRow> implied_asymptotic_variance_experiment(
    double l, std::span<const std::int64_t> n_grid, std::int64_t reps,
    std::uint64_t base_seed, bool fresh_samples = false, int threads = 0);

// One seeded sample path, swept over k for each method. Rows appear in
// (method, k_grid) order; per-k values do not depend on grid order.
struct PathRow {
  Method method = Method::Abm;
  SweepRow sweep;
};

std::vector<PathRow> single_sample_path(const DgpSpec& dgp, std::int64_t n,
                                        std::span<const std::int64_t> k_grid,
                                        std::span<const Method> methods,
                                        std::uint64_t seed, double c = 1e-3,
                                        double tol = 1e-10);

// Canned experiment configurations reproducing the simulation study designs.
const std::map<std::string, ExperimentConfig>& experiment_registry();

}  // namespace abm
