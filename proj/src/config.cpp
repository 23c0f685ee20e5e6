#include "abm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "abm/estimators.hpp"

namespace abm {

namespace {

std::optional<Family> family_from_name(const std::string& name) {
  for (Family f : {Family::Pareto, Family::Frechet, Family::HalfStudentT, Family::StudentT,
                   Family::Ar1, Family::Garch11, Family::ScaleHet})
    if (name == family_name(f)) return f;
  return std::nullopt;
}

[[noreturn]] void bad_field(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config field '" + key + "': " + what);
}

double require_number(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) bad_field(key, "expected a number");
  return j.get<double>();
}

std::int64_t require_integer(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_integer()) bad_field(key, "expected an integer");
  return j.get<std::int64_t>();
}

std::string require_string(const nlohmann::json& j, const std::string& key) {
  if (!j.is_string()) bad_field(key, "expected a string");
  return j.get<std::string>();
}

std::vector<std::int64_t> require_int_array(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array()) bad_field(key, "expected an array of integers");
  std::vector<std::int64_t> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(require_integer(e, key));
  return out;
}

// Keys a DGP description may use; everything else in the object belongs to
// the sampling layer.
const std::set<std::string>& dgp_keys() {
  static const std::set<std::string> keys = {"family", "dgp",     "gamma",   "nu",     "phi",
                                             "lambda0", "lambda1", "lambda2", "r",      "burn_in"};
  return keys;
}

const std::set<std::string>& experiment_keys() {
  static const std::set<std::string> keys = {"name", "n",    "n_grid", "k",   "k_grid",
                                             "k_rule", "methods", "reps", "c", "tol", "seed"};
  return keys;
}

void reject_unknown_keys(const nlohmann::json& root, bool sampling_allowed) {
  std::vector<std::string> unknown;
  for (const auto& item : root.items()) {
    const std::string& key = item.key();
    if (dgp_keys().count(key)) continue;
    if (sampling_allowed && experiment_keys().count(key)) continue;
    unknown.push_back(key);
  }
  if (unknown.empty()) return;
  std::string msg = "unknown config key(s):";
  for (const auto& k : unknown) msg += " '" + k + "'";
  throw std::invalid_argument(msg);
}

// Reads family parameters out of `params` (the root object in the flat
// form, the nested object in the object form).
DgpSpec dgp_from_params(Family family, const nlohmann::json& params) {
  DgpSpec spec;
  spec.family = family;
  if (params.contains("gamma")) spec.gamma = require_number(params.at("gamma"), "gamma");
  if (params.contains("nu")) spec.nu = require_number(params.at("nu"), "nu");
  if (params.contains("phi")) spec.phi = require_number(params.at("phi"), "phi");
  if (params.contains("lambda0")) spec.lambda0 = require_number(params.at("lambda0"), "lambda0");
  if (params.contains("lambda1")) spec.lambda1 = require_number(params.at("lambda1"), "lambda1");
  if (params.contains("lambda2")) spec.lambda2 = require_number(params.at("lambda2"), "lambda2");
  if (params.contains("r")) spec.r = require_number(params.at("r"), "r");
  if (family == Family::Ar1 || family == Family::Garch11) spec.burn_in = 100;
  if (params.contains("burn_in"))
    spec.burn_in = static_cast<int>(require_integer(params.at("burn_in"), "burn_in"));
  spec.validate();
  return spec;
}

DgpSpec dgp_from_json_object(const nlohmann::json& root) {
  if (!root.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (!root.contains("dgp")) bad_field("dgp", "required");
  const nlohmann::json& dgp = root.at("dgp");
  if (dgp.is_string()) {
    const std::string name = dgp.get<std::string>();
    const auto family = family_from_name(name);
    if (!family) bad_field("dgp", "unknown family '" + name + "'");
    return dgp_from_params(*family, root);
  }
  if (dgp.is_object()) {
    if (!dgp.contains("family")) bad_field("dgp.family", "required");
    const std::string name = require_string(dgp.at("family"), "dgp.family");
    const auto family = family_from_name(name);
    if (!family) bad_field("dgp.family", "unknown family '" + name + "'");
    reject_unknown_keys(dgp, /*sampling_allowed=*/false);
    return dgp_from_params(*family, dgp);
  }
  bad_field("dgp", "expected a family name or an object");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return root;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& root) {
  if (!root.is_object()) throw std::invalid_argument("config must be a JSON object");
  reject_unknown_keys(root, /*sampling_allowed=*/true);

  ExperimentConfig cfg;
  cfg.dgp = dgp_from_json_object(root);

  if (root.contains("name")) cfg.name = require_string(root.at("name"), "name");

  if (root.contains("n") && root.contains("n_grid"))
    bad_field("n", "give either 'n' or 'n_grid', not both");
  if (root.contains("n")) cfg.n_grid = {require_integer(root.at("n"), "n")};
  if (root.contains("n_grid")) cfg.n_grid = require_int_array(root.at("n_grid"), "n_grid");
  if (cfg.n_grid.empty()) bad_field("n", "required ('n' or 'n_grid')");

  const int k_forms = int(root.contains("k")) + int(root.contains("k_grid")) +
                      int(root.contains("k_rule"));
  if (k_forms > 1) bad_field("k", "give at most one of 'k', 'k_grid', 'k_rule'");
  if (root.contains("k")) {
    cfg.k_grid = {require_integer(root.at("k"), "k")};
  } else if (root.contains("k_grid")) {
    cfg.k_grid = require_int_array(root.at("k_grid"), "k_grid");
  } else if (root.contains("k_rule")) {
    const std::string rule = require_string(root.at("k_rule"), "k_rule");
    const auto parsed = k_rule_from_name(rule);
    if (!parsed || *parsed == KRule::Explicit)
      bad_field("k_rule", "expected one of 'n^1/3', 'n^1/2', 'n^2/3'");
    cfg.k_rule = *parsed;
  } else {
    cfg.k_rule = KRule::CubeRoot;
  }

  if (root.contains("methods")) {
    const nlohmann::json& methods = root.at("methods");
    if (!methods.is_array()) bad_field("methods", "expected an array of method names");
    cfg.methods.clear();
    for (const auto& e : methods) {
      const std::string name = require_string(e, "methods");
      const auto method = method_from_name(name);
      if (!method) bad_field("methods", "unknown method '" + name + "'");
      cfg.methods.push_back(*method);
    }
  } else {
    cfg.methods = {Method::Abm, Method::DisjointBm};
  }

  if (root.contains("reps")) cfg.reps = require_integer(root.at("reps"), "reps");
  if (root.contains("c")) cfg.c = require_number(root.at("c"), "c");
  if (root.contains("tol")) cfg.tol = require_number(root.at("tol"), "tol");
  if (root.contains("seed")) {
    const std::int64_t seed = require_integer(root.at("seed"), "seed");
    if (seed < 0) bad_field("seed", "must be >= 0");
    cfg.base_seed = static_cast<std::uint64_t>(seed);
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& name_or_path) {
  const auto& registry = experiment_registry();
  if (const auto it = registry.find(name_or_path); it != registry.end()) return it->second;
  if (!std::filesystem::exists(name_or_path)) {
    std::string msg = "'" + name_or_path + "' is neither a file nor a registry experiment; known:";
    for (const auto& [name, cfg] : registry) msg += " " + name;
    throw std::ios_base::failure(msg);
  }
  return config_from_json(read_json_file(name_or_path));
}

DgpSpec parse_dgp_config(const std::filesystem::path& path) {
  const nlohmann::json root = read_json_file(path);
  if (!root.is_object()) throw std::invalid_argument("dgp config must be a JSON object");
  reject_unknown_keys(root, /*sampling_allowed=*/true);
  return dgp_from_json_object(root);
}

nlohmann::json dgp_to_json(const DgpSpec& spec) {
  nlohmann::json j{{"family", family_name(spec.family)}};
  switch (spec.family) {
    case Family::Pareto:
    case Family::Frechet:
      j["gamma"] = spec.gamma;
      break;
    case Family::HalfStudentT:
    case Family::StudentT:
      j["nu"] = spec.nu;
      break;
    case Family::Ar1:
      j["phi"] = spec.phi;
      j["nu"] = spec.nu;
      j["burn_in"] = spec.burn_in;
      break;
    case Family::Garch11:
      j["lambda0"] = spec.lambda0;
      j["lambda1"] = spec.lambda1;
      j["lambda2"] = spec.lambda2;
      j["nu"] = spec.nu;
      j["burn_in"] = spec.burn_in;
      break;
    case Family::ScaleHet:
      j["r"] = spec.r;
      j["nu"] = spec.nu;
      break;
  }
  return j;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json j{{"name", config.name},
                   {"dgp", dgp_to_json(config.dgp)},
                   {"n_grid", config.n_grid},
                   {"reps", config.reps},
                   {"c", config.c},
                   {"tol", config.tol},
                   {"seed", config.base_seed}};
  if (config.k_rule == KRule::Explicit)
    j["k_grid"] = config.k_grid;
  else
    j["k_rule"] = k_rule_name(config.k_rule);
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : config.methods) methods.push_back(method_name(m));
  j["methods"] = std::move(methods);
  return j;
}

std::vector<double> read_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    std::size_t end = line.find_last_not_of(" \t");
    if (line[begin] == '#') continue;
    const char* first = line.data() + begin;
    const char* last = line.data() + end + 1;
    double value = 0.0;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": not a number: '" + line.substr(begin, end - begin + 1) + "'");
    out.push_back(value);
  }
  return out;
}

}  // namespace abm
