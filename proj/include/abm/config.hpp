#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "abm/distributions.hpp"
#include "abm/simulation.hpp"

namespace abm {

// Experiment configs are JSON objects. The DGP can be given inline
//
//   {"dgp": "pareto", "gamma": 0.5, "n": 1000}
//
// or as a nested object
//
//   {"dgp": {"family": "garch11", "lambda0": 0.5, ...}, "n": 2000}
//
// Sampling keys: "n" or "n_grid", "k" or "k_grid" or "k_rule" (one of
// "n^1/3", "n^1/2", "n^2/3"; defaults to "n^1/3" when no k is given),
// "methods" (default ["abm", "bm"]), "reps" (default 100), "c" (default
// 1e-3), "tol" (default 1e-10), "seed" (default 42), "name". Unknown keys
// are an error listing every offender.
ExperimentConfig config_from_json(const nlohmann::json& root);

// Registry name first, JSON file second. Throws std::invalid_argument for
// schema/validation problems and std::ios_base::failure when the file
// cannot be read.
ExperimentConfig parse_config(const std::string& name_or_path);

// Reads just the DGP portion of the schema from a file; sampling keys are
// permitted and ignored so a full experiment config works here too.
DgpSpec parse_dgp_config(const std::filesystem::path& path);

// Canonical JSON echoes, used in result manifests. Only the fields the
// family actually reads are emitted.
nlohmann::json dgp_to_json(const DgpSpec& spec);
nlohmann::json config_to_json(const ExperimentConfig& config);

// One observation per line, '#' comments and blank lines skipped. Throws
// std::invalid_argument carrying the 1-based line number of the first bad
// line, std::ios_base::failure if the file cannot be opened.
std::vector<double> read_observations(const std::filesystem::path& path);

}  // namespace abm
