// abm-evi command line tool: tail index estimation, simulation harness, and
// numeric self-checks. Subcommands: weights, estimate, simulate, verify.
//
// Exit codes: 0 success, 2 validation error, 3 fit failure (estimate), 4 I/O.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abm/asymptotics.hpp"
#include "abm/config.hpp"
#include "abm/distributions.hpp"
#include "abm/errors.hpp"
#include "abm/estimators.hpp"
#include "abm/rng.hpp"
#include "abm/sha1.hpp"
#include "abm/simulation.hpp"
#include "abm/table.hpp"
#include "abm/version.hpp"
#include "abm/weights.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitFit = 3;
constexpr int kExitIo = 4;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// Tables going to stdout get their hash on stderr so the data stream stays
// machine-readable; file outputs print it on stdout.
void print_hash(const std::string& hash, bool data_on_stdout) {
  (data_on_stdout ? std::cerr : std::cout) << "content_hash=" << hash << "\n";
}

void emit_table(const abm::ResultTable& table, const nlohmann::json& config_echo,
                std::uint64_t base_seed, const std::string& format) {
  const abm::Manifest manifest = abm::make_manifest(config_echo, base_seed, table);
  if (format == "json")
    std::cout << abm::table_json(table, manifest).dump(2) << "\n";
  else
    std::cout << abm::to_csv(table);
  print_hash(manifest.content_hash, /*data_on_stdout=*/true);
}

// ---------------------------------------------------------------- weights --

struct WeightsArgs {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::string format = "csv";
};

int run_weights(const WeightsArgs& args) {
  const abm::WeightVector w = abm::abm_weights(args.n, args.m);
  abm::ResultTable table;
  table.columns = {"index", "weight"};
  table.rows.reserve(w.values.size());
  for (std::size_t i = 0; i < w.values.size(); ++i)
    table.rows.push_back({static_cast<std::int64_t>(i + 1), w.values[i]});
  emit_table(table, nlohmann::json{{"command", "weights"}, {"n", args.n}, {"m", args.m}}, 0,
             args.format);
  return kExitOk;
}

// --------------------------------------------------------------- estimate --

struct EstimateArgs {
  std::string input;
  std::string method;
  std::optional<std::int64_t> m;
  std::optional<std::int64_t> k;
  std::string k_grid;  // "a:b:step"
  double c = 1e-3;
  std::string format = "csv";
};

std::vector<std::int64_t> parse_k_grid(const std::string& text) {
  std::int64_t a = 0, b = 0, step = 0;
  char sep1 = 0, sep2 = 0;
  std::istringstream in(text);
  if (!(in >> a >> sep1 >> b >> sep2 >> step) || sep1 != ':' || sep2 != ':' || !in.eof())
    throw std::invalid_argument("--k-grid: expected a:b:step, got '" + text + "'");
  if (a < 1 || b < a || step < 1)
    throw std::invalid_argument("--k-grid: need 1 <= a <= b and step >= 1");
  std::vector<std::int64_t> grid;
  for (std::int64_t k = a; k <= b; k += step) grid.push_back(k);
  return grid;
}

void push_estimate_row(abm::ResultTable& table, std::int64_t n, std::int64_t k,
                       const abm::EstimateResult& r) {
  table.rows.push_back({std::string(abm::method_name(r.method)), n, k,
                        r.block_size.value_or(0), r.gamma_hat, r.sigma_hat.value_or(nan_value()),
                        r.k_effective, static_cast<std::int64_t>(r.solver.iterations),
                        r.solver.residual});
}

int run_estimate(const EstimateArgs& args) {
  const auto method = abm::method_from_name(args.method);
  if (!method) throw std::invalid_argument("--method: unknown method '" + args.method + "'");

  const std::vector<double> data = abm::read_observations(args.input);
  const auto n = static_cast<std::int64_t>(data.size());
  if (n == 0) throw std::invalid_argument(args.input + ": no observations");

  const int selectors =
      int(args.m.has_value()) + int(args.k.has_value()) + int(!args.k_grid.empty());
  if (selectors != 1)
    throw std::invalid_argument("give exactly one of --m, --k, --k-grid");
  if (args.m && *method == abm::Method::Hill)
    throw std::invalid_argument("--m: hill is indexed by k, use --k");

  abm::ResultTable table;
  table.columns = {"method", "n",           "k",          "m",       "gamma_hat",
                   "sigma_hat", "k_effective", "iterations", "residual"};

  const nlohmann::json echo{{"command", "estimate"}, {"input", args.input},
                            {"method", args.method}, {"c", args.c}};

  if (!args.k_grid.empty()) {
    const std::vector<std::int64_t> grid = parse_k_grid(args.k_grid);
    const std::vector<abm::SweepRow> sweep = abm::k_sweep(data, *method, grid, args.c);
    table.columns.push_back("error");
    for (const abm::SweepRow& row : sweep) {
      if (row.result) {
        push_estimate_row(table, n, row.k, *row.result);
        table.rows.back().push_back(std::string());
      } else {
        table.rows.push_back({std::string(abm::method_name(*method)), n, row.k,
                              std::int64_t{0}, nan_value(), nan_value(), nan_value(),
                              std::int64_t{0}, nan_value(), row.error});
      }
    }
    emit_table(table, echo, 0, args.format);
    return kExitOk;
  }

  abm::EstimateResult result;
  std::int64_t k_column = 0;
  if (args.m) {
    switch (*method) {
      case abm::Method::Abm: result = abm::abm_estimate(data, *args.m, args.c); break;
      case abm::Method::DisjointBm:
        result = abm::disjoint_bm_estimate(data, *args.m, args.c);
        break;
      case abm::Method::SlidingBm:
        result = abm::sliding_bm_estimate(data, *args.m, args.c);
        break;
      case abm::Method::Hill: throw std::invalid_argument("--m: hill is indexed by k");
    }
    k_column = static_cast<std::int64_t>(std::llround(result.k_effective));
  } else {
    k_column = *args.k;
    if (*method == abm::Method::Hill) {
      result = abm::hill_estimate(data, k_column);
    } else {
      const std::int64_t m = n / k_column;
      switch (*method) {
        case abm::Method::Abm: result = abm::abm_estimate(data, m, args.c); break;
        case abm::Method::DisjointBm:
          result = abm::disjoint_bm_estimate(data, m, args.c);
          break;
        case abm::Method::SlidingBm:
          result = abm::sliding_bm_estimate(data, m, args.c);
          break;
        case abm::Method::Hill: break;
      }
    }
  }
  push_estimate_row(table, n, k_column, result);
  emit_table(table, echo, 0, args.format);
  return kExitOk;
}

// --------------------------------------------------------------- simulate --

struct SimulateArgs {
  std::string dgp_file;
  std::string experiment;
  std::string config_file;
  bool implied_variance = false;
  std::string rule = "n^1/3";
  std::vector<std::int64_t> n_grid;
  bool fresh = false;
  std::int64_t n = 0;
  std::optional<std::int64_t> reps;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_simulate_dump(const SimulateArgs& args) {
  if (args.n < 1) throw std::invalid_argument("--n: must be >= 1 for a series dump");
  if (args.out.empty()) throw std::invalid_argument("--out: required");
  const abm::DgpSpec dgp = abm::parse_dgp_config(args.dgp_file);
  const std::uint64_t seed = args.seed.value_or(42);
  abm::RngStream rng(seed, 0);
  const std::vector<double> series = abm::draw_series(dgp, static_cast<std::size_t>(args.n), rng);

  std::string text = "# " + std::string(abm::family_name(dgp.family)) + " series, n=" +
                     std::to_string(args.n) + ", seed=" + std::to_string(seed) + "\n";
  for (double v : series) text += abm::format_double(v) + "\n";

  std::ofstream outf(args.out, std::ios::binary);
  if (!outf) throw std::ios_base::failure("cannot open " + args.out + " for writing");
  outf << text;
  if (!outf) throw std::ios_base::failure("write failed: " + args.out);
  print_hash(abm::git_blob_hash(text), /*data_on_stdout=*/false);
  return kExitOk;
}

abm::ResultTable summary_table(const abm::McSummary& summary) {
  abm::ResultTable table;
  table.columns = {"method", "n",   "k",   "m",   "bias", "variance",
                   "mse",    "implied_asym_var", "reps_succeeded", "reps_failed", "valid"};
  for (const abm::McCell& cell : summary.cells)
    table.rows.push_back({std::string(abm::method_name(cell.method)), cell.n, cell.k, cell.m,
                          cell.bias, cell.variance, cell.mse, cell.implied_asym_var,
                          cell.reps_succeeded, cell.reps_failed,
                          std::int64_t{cell.valid ? 1 : 0}});
  return table;
}

void write_run_outputs(const std::string& out_dir, const std::string& table_name,
                       const abm::ResultTable& table, const nlohmann::json& echo,
                       std::uint64_t base_seed) {
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::ios_base::failure("cannot create " + dir.string() + ": " + ec.message());

  abm::write_csv_file(table, dir / (table_name + ".csv"));
  const abm::Manifest manifest = abm::make_manifest(echo, base_seed, table);
  std::ofstream mf(dir / "manifest.json", std::ios::binary);
  if (!mf) throw std::ios_base::failure("cannot open manifest.json for writing");
  mf << abm::manifest_json(manifest).dump(2) << "\n";
  if (!mf) throw std::ios_base::failure("write failed: manifest.json");
  print_hash(manifest.content_hash, /*data_on_stdout=*/false);
}

int run_simulate_experiment(const SimulateArgs& args) {
  if (args.out.empty()) throw std::invalid_argument("--out: required");
  abm::ExperimentConfig config =
      abm::parse_config(args.experiment.empty() ? args.config_file : args.experiment);
  if (args.reps) config.reps = *args.reps;
  if (args.seed) config.base_seed = *args.seed;

  const abm::McSummary summary = abm::run_experiment(config);
  nlohmann::json echo = abm::config_to_json(config);
  echo["true_gamma"] = summary.true_gamma;
  write_run_outputs(args.out, "cells", summary_table(summary), echo, config.base_seed);
  return kExitOk;
}

int run_simulate_implied(const SimulateArgs& args) {
  if (args.out.empty()) throw std::invalid_argument("--out: required");
  if (args.n_grid.empty()) throw std::invalid_argument("--n-grid: required");
  const auto rule = abm::k_rule_from_name(args.rule);
  if (!rule || *rule == abm::KRule::Explicit)
    throw std::invalid_argument("--rule: expected one of 'n^1/3', 'n^1/2', 'n^2/3'");
  const std::int64_t reps = args.reps.value_or(200);
  const std::uint64_t seed = args.seed.value_or(42);

  const std::vector<abm::ImpliedVarRow> rows = abm::implied_asymptotic_variance_experiment(
      abm::k_rule_exponent(*rule), args.n_grid, reps, seed, args.fresh);

  abm::ResultTable table;
  table.columns = {"n", "k", "m", "implied_asym_var", "reps_succeeded", "reps_failed"};
  for (const abm::ImpliedVarRow& row : rows)
    table.rows.push_back(
        {row.n, row.k, row.m, row.implied_asym_var, row.reps_succeeded, row.reps_failed});

  const nlohmann::json echo{{"command", "simulate"},
                            {"mode", "implied-variance"},
                            {"rule", args.rule},
                            {"n_grid", args.n_grid},
                            {"reps", reps},
                            {"fresh", args.fresh},
                            {"seed", seed}};
  write_run_outputs(args.out, "implied_variance", table, echo, seed);
  return kExitOk;
}

int run_simulate(const SimulateArgs& args) {
  const int modes = int(!args.dgp_file.empty()) +
                    int(!args.experiment.empty() || !args.config_file.empty()) +
                    int(args.implied_variance);
  if (modes != 1)
    throw std::invalid_argument(
        "give exactly one of --dgp, --experiment/--config, --implied-variance");
  if (!args.experiment.empty() && !args.config_file.empty())
    throw std::invalid_argument("give either --experiment or --config, not both");
  if (!args.dgp_file.empty()) return run_simulate_dump(args);
  if (args.implied_variance) return run_simulate_implied(args);
  return run_simulate_experiment(args);
}

// ----------------------------------------------------------------- verify --

struct VerifyArgs {
  std::string what;
  double gamma = 1.0;
  std::int64_t reps = 100000;
  std::uint64_t seed = 42;
};

nlohmann::json mat_json(const abm::Mat3x3& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

nlohmann::json mat_json(const abm::Mat2x3& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

nlohmann::json mat_json(const abm::Mat2x2& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

int run_verify(const VerifyArgs& args) {
  nlohmann::json out{{"what", args.what}};
  if (args.what == "matrices") {
    const abm::AsymptoticMatrices mats = abm::asymptotic_matrices(args.gamma);
    out["gamma"] = mats.gamma;
    out["m_matrix"] = mat_json(mats.m);
    out["sigma_matrix"] = mat_json(mats.sigma);
    out["limit_covariance"] = mat_json(mats.limit_cov);
    out["variance_constant"] = mats.variance_constant_a;
  } else if (args.what == "covariance-mc") {
    const abm::RngStream stream(args.seed, 0);
    const abm::McCovarianceCheck check =
        abm::covariance_mc_check(args.gamma, args.reps, stream);
    const abm::Mat3x3 closed = abm::sigma_matrix(args.gamma);
    double max_abs_diff = 0.0, max_se_ratio = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double diff = std::abs(check.estimate[i][j] - closed[i][j]);
        max_abs_diff = std::max(max_abs_diff, diff);
        if (check.standard_error[i][j] > 0.0)
          max_se_ratio = std::max(max_se_ratio, diff / check.standard_error[i][j]);
      }
    }
    out["gamma"] = args.gamma;
    out["reps"] = check.reps;
    out["seed"] = args.seed;
    out["estimate"] = mat_json(check.estimate);
    out["standard_error"] = mat_json(check.standard_error);
    out["closed_form"] = mat_json(closed);
    out["max_abs_diff"] = max_abs_diff;
    out["max_se_ratio"] = max_se_ratio;
  } else if (args.what == "variance-constant") {
    nlohmann::json rows = nlohmann::json::array();
    for (double g : {0.5, 1.0, 2.0})
      rows.push_back({{"gamma", g}, {"a", abm::abm_variance_constant(g)}});
    out["values"] = std::move(rows);
  } else {
    throw std::invalid_argument(
        "--what: expected matrices, covariance-mc, or variance-constant");
  }
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  print_hash(abm::git_blob_hash(text), /*data_on_stdout=*/true);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(abm::kToolName) + " " + abm::kToolVersion +
               ": heavy-tail index estimation and simulation"};
  app.require_subcommand(1);

  WeightsArgs weights;
  CLI::App* weights_cmd = app.add_subcommand("weights", "Order-statistic weights for a given n, m");
  weights_cmd->add_option("--n", weights.n, "Sample size")->required();
  weights_cmd->add_option("--m", weights.m, "Block size")->required();
  weights_cmd->add_option("--format", weights.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  EstimateArgs estimate;
  CLI::App* estimate_cmd = app.add_subcommand("estimate", "Fit a tail index to a data file");
  estimate_cmd->add_option("--input", estimate.input, "File with one observation per line")
      ->required();
  estimate_cmd->add_option("--method", estimate.method, "abm, bm, sliding, or hill")->required();
  estimate_cmd->add_option("--m", estimate.m, "Block size");
  estimate_cmd->add_option("--k", estimate.k, "Number of blocks (or top order statistics)");
  estimate_cmd->add_option("--k-grid", estimate.k_grid, "Sweep k over a:b:step");
  estimate_cmd->add_option("--c", estimate.c, "Truncation floor")->capture_default_str();
  estimate_cmd->add_option("--format", estimate.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  SimulateArgs simulate;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Draw series or run experiments");
  simulate_cmd->add_option("--dgp", simulate.dgp_file, "DGP config file; dumps a raw series");
  simulate_cmd->add_option("--experiment", simulate.experiment, "Registry experiment name");
  simulate_cmd->add_option("--config", simulate.config_file, "Experiment config file");
  simulate_cmd->add_flag("--implied-variance", simulate.implied_variance,
                         "Implied asymptotic variance across sample sizes");
  simulate_cmd->add_option("--rule", simulate.rule, "k rule for --implied-variance")->capture_default_str();
  simulate_cmd->add_option("--n-grid", simulate.n_grid, "Sample sizes for --implied-variance")
      ->delimiter(',');
  simulate_cmd->add_flag("--fresh", simulate.fresh,
                         "Draw a fresh series per (replicate, n) instead of prefixes");
  simulate_cmd->add_option("--n", simulate.n, "Series length for --dgp");
  simulate_cmd->add_option("--reps", simulate.reps, "Replicates override");
  simulate_cmd->add_option("--seed", simulate.seed, "Base seed override");
  simulate_cmd->add_option("--out", simulate.out, "Output file (--dgp) or directory");

  VerifyArgs verify;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Numeric self-checks, JSON output");
  verify_cmd->add_option("--what", verify.what, "matrices, covariance-mc, or variance-constant")
      ->required();
  verify_cmd->add_option("--gamma", verify.gamma, "Tail index")->capture_default_str();
  verify_cmd->add_option("--reps", verify.reps, "Monte Carlo replicates")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "Stream seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (weights_cmd->parsed()) return run_weights(weights);
    if (estimate_cmd->parsed()) return run_estimate(estimate);
    if (simulate_cmd->parsed()) return run_simulate(simulate);
    if (verify_cmd->parsed()) return run_verify(verify);
    std::cerr << "error: no subcommand\n";
    return kExitValidation;
  } catch (const abm::NoUniqueMaximizerError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kExitFit;
  } catch (const abm::BracketingFailedError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kExitFit;
  } catch (const abm::NoKestenIndexError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
