#include "abm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "abm/numerics.hpp"
#include "abm/parallel.hpp"
#include "abm/rng.hpp"

namespace abm {

const char* k_rule_name(KRule r) {
  switch (r) {
    case KRule::Explicit: return "explicit";
    case KRule::CubeRoot: return "n^1/3";
    case KRule::SqrtN: return "n^1/2";
    case KRule::TwoThirds: return "n^2/3";
  }
  return "?";
}

std::optional<KRule> k_rule_from_name(const std::string& name) {
  if (name == "explicit") return KRule::Explicit;
  if (name == "n^1/3") return KRule::CubeRoot;
  if (name == "n^1/2") return KRule::SqrtN;
  if (name == "n^2/3") return KRule::TwoThirds;
  return std::nullopt;
}

double k_rule_exponent(KRule r) {
  switch (r) {
    case KRule::CubeRoot: return 1.0 / 3.0;
    case KRule::SqrtN: return 0.5;
    case KRule::TwoThirds: return 2.0 / 3.0;
    case KRule::Explicit: break;
  }
  throw std::invalid_argument("k_rule_exponent: explicit rule has no exponent");
}

std::vector<std::int64_t> ExperimentConfig::ks_for(std::int64_t n) const {
  if (k_rule == KRule::Explicit) return k_grid;
  const auto k = static_cast<std::int64_t>(
      std::llround(std::pow(static_cast<double>(n), k_rule_exponent(k_rule))));
  return {std::max<std::int64_t>(k, 1)};
}

void ExperimentConfig::validate() const {
  dgp.validate();
  if (n_grid.empty()) throw std::invalid_argument("config field 'n_grid': must be nonempty");
  for (std::int64_t n : n_grid) {
    if (n < 2) throw std::invalid_argument("config field 'n_grid': entries must be >= 2");
    if (dgp.family == Family::ScaleHet && n % 2 != 0)
      throw std::invalid_argument("config field 'n_grid': scale_het requires even n");
  }
  if (k_rule == KRule::Explicit) {
    if (k_grid.empty())
      throw std::invalid_argument("config field 'k_grid': must be nonempty (or set k_rule)");
    std::set<std::int64_t> seen;
    for (std::int64_t k : k_grid) {
      if (k < 1) throw std::invalid_argument("config field 'k_grid': entries must be >= 1");
      if (!seen.insert(k).second)
        throw std::invalid_argument("config field 'k_grid': duplicate entry " + std::to_string(k));
    }
  }
  if (methods.empty()) throw std::invalid_argument("config field 'methods': must be nonempty");
  if (reps < 1) throw std::invalid_argument("config field 'reps': must be >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("config field 'c': must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("config field 'tol': must be positive");
  // Every cell must be estimable up front; a bad (n, k) pair is a config
  // error, not a per-replicate failure.
  for (std::int64_t n : n_grid) {
    for (std::int64_t k : ks_for(n)) {
      for (Method method : methods) {
        if (method == Method::Hill) {
          if (k > n - 1)
            throw std::invalid_argument("config field 'k_grid': hill needs k <= n-1, got k=" +
                                        std::to_string(k) + " at n=" + std::to_string(n));
          continue;
        }
        const std::int64_t m = n / k;
        if (m < 2)
          throw std::invalid_argument("config field 'k_grid': m = floor(n/k) = " +
                                      std::to_string(m) + " < 2 at n=" + std::to_string(n) +
                                      ", k=" + std::to_string(k));
        if (method == Method::DisjointBm && n < 2 * m)
          throw std::invalid_argument("config field 'k_grid': bm needs n >= 2m at n=" +
                                      std::to_string(n) + ", k=" + std::to_string(k));
      }
    }
  }
}

namespace {

struct Cell {
  Method method;
  std::int64_t n;
  std::int64_t k;
  std::int64_t m;  // 0 for Hill
};

double estimate_gamma(const Cell& cell, std::span<const double> series, double c, double tol) {
  const std::span<const double> prefix = series.first(static_cast<std::size_t>(cell.n));
  switch (cell.method) {
    case Method::Abm: return abm_estimate(prefix, cell.m, c, tol).gamma_hat;
    case Method::DisjointBm: return disjoint_bm_estimate(prefix, cell.m, c, tol).gamma_hat;
    case Method::SlidingBm: return sliding_bm_estimate(prefix, cell.m, c, tol).gamma_hat;
    case Method::Hill: return hill_estimate(prefix, cell.k).gamma_hat;
  }
  throw std::logic_error("estimate_gamma: unknown method");
}

// Population moments of the successful estimates, in replicate order.
struct CellMoments {
  double bias = std::numeric_limits<double>::quiet_NaN();
  double variance = std::numeric_limits<double>::quiet_NaN();
  double mse = std::numeric_limits<double>::quiet_NaN();
  std::int64_t succeeded = 0;
};

CellMoments aggregate(std::span<const double> gamma_hats, double true_gamma) {
  CellMoments out;
  KahanSum sum;
  for (double g : gamma_hats) {
    if (std::isnan(g)) continue;
    sum.add(g);
    ++out.succeeded;
  }
  if (out.succeeded == 0) return out;
  const double count = static_cast<double>(out.succeeded);
  const double mean = sum.value() / count;
  KahanSum var_sum, mse_sum;
  for (double g : gamma_hats) {
    if (std::isnan(g)) continue;
    var_sum.add((g - mean) * (g - mean));
    mse_sum.add((g - true_gamma) * (g - true_gamma));
  }
  out.bias = mean - true_gamma;
  out.variance = var_sum.value() / count;
  out.mse = mse_sum.value() / count;
  return out;
}

}  // namespace

McSummary run_experiment(const ExperimentConfig& config, int threads) {
  config.validate();
  const double true_gamma = config.dgp.true_gamma();
  const std::int64_t n_max = *std::max_element(config.n_grid.begin(), config.n_grid.end());

  std::vector<Cell> cells;
  for (Method method : config.methods)
    for (std::int64_t n : config.n_grid)
      for (std::int64_t k : config.ks_for(n))
        cells.push_back({method, n, k, method == Method::Hill ? 0 : n / k});

  // estimates[r * cells + c]; NaN marks a failed fit.
  const std::size_t n_cells = cells.size();
  std::vector<double> estimates(static_cast<std::size_t>(config.reps) * n_cells,
                                std::numeric_limits<double>::quiet_NaN());

  parallel_for(static_cast<std::size_t>(config.reps), threads, [&](std::size_t r) {
    RngStream rng(config.base_seed, static_cast<std::uint64_t>(r));
    const std::vector<double> series =
        draw_series(config.dgp, static_cast<std::size_t>(n_max), rng);
    for (std::size_t ci = 0; ci < n_cells; ++ci) {
      try {
        estimates[r * n_cells + ci] = estimate_gamma(cells[ci], series, config.c, config.tol);
      } catch (const std::exception&) {
        // leave NaN; counted as a failed replicate for this cell
      }
    }
  });

  McSummary out;
  out.config = config;
  out.true_gamma = true_gamma;
  out.cells.reserve(n_cells);
  std::vector<double> column(static_cast<std::size_t>(config.reps));
  for (std::size_t ci = 0; ci < n_cells; ++ci) {
    for (std::int64_t r = 0; r < config.reps; ++r)
      column[static_cast<std::size_t>(r)] = estimates[static_cast<std::size_t>(r) * n_cells + ci];
    const CellMoments m = aggregate(column, true_gamma);
    McCell cell;
    cell.method = cells[ci].method;
    cell.n = cells[ci].n;
    cell.k = cells[ci].k;
    cell.m = cells[ci].m;
    cell.bias = m.bias;
    cell.variance = m.variance;
    cell.mse = m.mse;
    cell.implied_asym_var =
        static_cast<double>(cells[ci].k) * m.variance / (true_gamma * true_gamma);
    cell.reps_succeeded = m.succeeded;
    cell.reps_failed = config.reps - m.succeeded;
    cell.valid = m.succeeded > 0 && 2 * cell.reps_failed <= config.reps;
    out.cells.push_back(cell);
  }
  return out;
}

std::vector<ImpliedVarRow> implied_asymptotic_variance_experiment(
    double l, std::span<const std::int64_t> n_grid, std::int64_t reps,
    std::uint64_t base_seed, bool fresh_samples, int threads) {
  if (!(l > 0.0) || !(l < 1.0))
    throw std::invalid_argument("implied variance: exponent l must lie in (0,1)");
  if (n_grid.empty()) throw std::invalid_argument("implied variance: empty n grid");
  if (reps < 2) throw std::invalid_argument("implied variance: reps must be >= 2");

  const DgpSpec dgp = DgpSpec::half_student_t(2.0);
  const double true_gamma = dgp.true_gamma();  // 1/2
  constexpr double kTruncation = 1e-3;
  constexpr double kTol = 1e-10;

  const std::int64_t n_max = *std::max_element(n_grid.begin(), n_grid.end());
  const std::size_t n_count = n_grid.size();

  std::vector<std::int64_t> ks(n_count), ms(n_count);
  for (std::size_t i = 0; i < n_count; ++i) {
    const std::int64_t n = n_grid[i];
    const auto k = static_cast<std::int64_t>(
        std::llround(std::pow(static_cast<double>(n), l)));
    if (k < 1 || n / std::max<std::int64_t>(k, 1) < 2)
      throw std::invalid_argument("implied variance: k = round(n^l) gives m < 2 at n = " +
                                  std::to_string(n));
    ks[i] = k;
    ms[i] = n / k;
  }

  std::vector<double> estimates(static_cast<std::size_t>(reps) * n_count,
                                std::numeric_limits<double>::quiet_NaN());
  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    RngStream rng(base_seed, static_cast<std::uint64_t>(r));
    std::vector<double> series;
    if (!fresh_samples)
      series = sample_iid(dgp, static_cast<std::size_t>(n_max), rng);
    for (std::size_t i = 0; i < n_count; ++i) {
      if (fresh_samples) {
        RngStream cell_rng = rng.substream(static_cast<std::uint64_t>(i));
        series = sample_iid(dgp, static_cast<std::size_t>(n_grid[i]), cell_rng);
      }
      const std::span<const double> prefix(series.data(),
                                           static_cast<std::size_t>(n_grid[i]));
      try {
        estimates[r * n_count + i] = abm_estimate(prefix, ms[i], kTruncation, kTol).gamma_hat;
      } catch (const std::exception&) {
      }
    }
  });

  std::vector<ImpliedVarRow> rows(n_count);
  std::vector<double> column(static_cast<std::size_t>(reps));
  for (std::size_t i = 0; i < n_count; ++i) {
    for (std::int64_t r = 0; r < reps; ++r)
      column[static_cast<std::size_t>(r)] = estimates[static_cast<std::size_t>(r) * n_count + i];
    const CellMoments m = aggregate(column, true_gamma);
    rows[i].n = n_grid[i];
    rows[i].k = ks[i];
    rows[i].m = ms[i];
    rows[i].implied_asym_var =
        static_cast<double>(ks[i]) * m.variance / (true_gamma * true_gamma);
    rows[i].reps_succeeded = m.succeeded;
    rows[i].reps_failed = reps - m.succeeded;
  }
  return rows;
}

std::vector<PathRow> single_sample_path(const DgpSpec& dgp, std::int64_t n,
                                        std::span<const std::int64_t> k_grid,
                                        std::span<const Method> methods,
                                        std::uint64_t seed, double c, double tol) {
  if (n < 2) throw std::invalid_argument("single_sample_path: n must be >= 2");
  if (methods.empty()) throw std::invalid_argument("single_sample_path: no methods");
  RngStream rng(seed, 0);
  const std::vector<double> series = draw_series(dgp, static_cast<std::size_t>(n), rng);
  std::vector<PathRow> rows;
  rows.reserve(methods.size() * k_grid.size());
  for (Method method : methods) {
    std::vector<SweepRow> sweep = k_sweep(series, method, k_grid, c, tol);
    for (SweepRow& s : sweep) rows.push_back({method, std::move(s)});
  }
  return rows;
}

const std::map<std::string, ExperimentConfig>& experiment_registry() {
  static const std::map<std::string, ExperimentConfig> registry = [] {
    std::map<std::string, ExperimentConfig> reg;

    const std::vector<std::int64_t> grid_1000 = {5,  10, 15,  20,  25,  30,  40,  50, 60,
                                                 75, 100, 125, 150, 200, 250, 330, 500};
    const std::vector<std::int64_t> grid_2000 = {5,   10,  15,  20,  30,  40,  50,  75, 100,
                                                 150, 200, 300, 400, 500, 660, 1000};

    auto add = [&reg](std::string name, DgpSpec dgp, std::int64_t n,
                      std::vector<std::int64_t> k_grid) {
      ExperimentConfig cfg;
      cfg.name = name;
      cfg.dgp = dgp;
      cfg.n_grid = {n};
      cfg.k_grid = std::move(k_grid);
      cfg.methods = {Method::Abm, Method::DisjointBm};
      cfg.reps = 100;
      cfg.c = 1e-3;
      cfg.base_seed = 42;
      reg.emplace(std::move(name), std::move(cfg));
    };

    add("fig3a-student-t2", DgpSpec::half_student_t(2.0), 1000, grid_1000);
    add("fig3b-student-t3", DgpSpec::half_student_t(3.0), 1000, grid_1000);
    add("fig3c-student-t4", DgpSpec::half_student_t(4.0), 1000, grid_1000);
    add("fig3d-student-t5", DgpSpec::half_student_t(5.0), 1000, grid_1000);
    add("fig6a-frechet-half", DgpSpec::frechet(0.5), 1000, grid_1000);
    add("fig6b-pareto-half", DgpSpec::pareto(0.5), 1000, grid_1000);
    add("fig7-ar1-phi01", DgpSpec::ar1(0.1, 2.0), 2000, grid_2000);
    add("fig7-ar1-phi05", DgpSpec::ar1(0.5, 2.0), 2000, grid_2000);
    add("fig7-ar1-phi09", DgpSpec::ar1(0.9, 2.0), 2000, grid_2000);
    add("fig8-garch-heavy", DgpSpec::garch11(0.5, 0.11, 0.88, 6.0), 2000, grid_2000);
    add("fig8-garch-light", DgpSpec::garch11(0.5, 0.08, 0.91, 6.0), 2000, grid_2000);
    add("fig9a-scalehet-r2", DgpSpec::scale_het(2.0, 2.0), 1000, grid_1000);
    add("fig9b-scalehet-r5", DgpSpec::scale_het(5.0, 2.0), 1000, grid_1000);
    return reg;
  }();
  return registry;
}

}  // namespace abm
