// End-to-end checks of the command line tool. Each case spawns the real
// binary (path injected by the build as ABM_CLI_PATH) through the shell and
// inspects exit code, stdout, stderr and any files it wrote.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "abm/table.hpp"

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path temp_file(const std::string& name, const std::string& text) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

// `prefix` lets a case set environment variables for the child process.
CliRun run_cli(const std::string& args, const std::string& prefix = "") {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path();
  const fs::path out_path = dir / ("abm_cli_out_" + std::to_string(++counter));
  const fs::path err_path = dir / ("abm_cli_err_" + std::to_string(counter));
  const std::string cmd = prefix + ABM_CLI_PATH " " + args + " > " + out_path.string() +
                          " 2> " + err_path.string();
  const int status = std::system(cmd.c_str());
  CliRun r;
  if (status >= 0 && WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  fs::remove(out_path);
  fs::remove(err_path);
  return r;
}

// Value of the content_hash=<hex> line, wherever the tool printed it.
std::string hash_value(const std::string& text) {
  const auto pos = text.find("content_hash=");
  if (pos == std::string::npos) return {};
  const auto start = pos + std::string("content_hash=").size();
  const auto end = text.find('\n', start);
  return text.substr(start, end - start);
}

}  // namespace

TEST_CASE("cli: weights prints the weight table with its hash on stderr") {
  const CliRun r = run_cli("weights --n 4 --m 2");
  CHECK(r.exit_code == 0);
  CHECK(r.out ==
        "index,weight\n"
        "1,0.5\n"
        "2,0.33333333333333331\n"
        "3,0.16666666666666666\n");
  CHECK(hash_value(r.err).size() == 40);
  CHECK(hash_value(r.out).empty());  // data stream stays clean

  const CliRun j = run_cli("weights --n 4 --m 2 --format json");
  CHECK(j.exit_code == 0);
  const nlohmann::json parsed = nlohmann::json::parse(j.out);
  CHECK(parsed.at("rows")[0].at("weight") == 0.5);
  CHECK(parsed.at("manifest").at("config").at("command") == "weights");
  CHECK(parsed.at("manifest").at("content_hash") == hash_value(j.err));
}

TEST_CASE("cli: a dumped series feeds straight back into estimate") {
  const fs::path dgp = temp_file("abm_cli_dgp.json", R"({"dgp": "pareto", "gamma": 0.5})");
  const fs::path series = fs::temp_directory_path() / "abm_cli_series.txt";

  const CliRun dump = run_cli("simulate --dgp " + dgp.string() + " --n 200 --seed 5 --out " +
                              series.string());
  CHECK(dump.exit_code == 0);
  CHECK(hash_value(dump.out).size() == 40);  // file output: hash on stdout

  const CliRun fit =
      run_cli("estimate --input " + series.string() + " --method abm --m 10");
  CHECK(fit.exit_code == 0);
  CHECK(fit.out.find("method,n,k,m,gamma_hat,sigma_hat,k_effective,iterations,residual\n") == 0);
  CHECK(fit.out.find("abm,200,20,10,") != std::string::npos);

  const CliRun hill =
      run_cli("estimate --input " + series.string() + " --method hill --k 25");
  CHECK(hill.exit_code == 0);
  CHECK(hill.out.find("hill,200,25,0,") != std::string::npos);

  const CliRun sweep =
      run_cli("estimate --input " + series.string() + " --method bm --k-grid 5:25:10");
  CHECK(sweep.exit_code == 0);
  CHECK(sweep.out.find(",error\n") != std::string::npos);
  CHECK(sweep.out.find("bm,200,5,40,") != std::string::npos);
  CHECK(sweep.out.find("bm,200,25,8,") != std::string::npos);

  // same command, same bytes, same hash
  const CliRun again =
      run_cli("estimate --input " + series.string() + " --method abm --m 10");
  CHECK(again.out == fit.out);
  CHECK(hash_value(again.err) == hash_value(fit.err));

  fs::remove(dgp);
  fs::remove(series);
}

TEST_CASE("cli: estimate reports bad input with the proper exit codes") {
  const fs::path bad = temp_file("abm_cli_bad_obs.txt", "1.0\n2.0\noops\n");
  const CliRun r = run_cli("estimate --input " + bad.string() + " --method abm --m 5");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find(":3:") != std::string::npos);
  fs::remove(bad);

  const CliRun missing = run_cli("estimate --input /no/such/data.txt --method abm --m 5");
  CHECK(missing.exit_code == 4);

  const fs::path ok = temp_file("abm_cli_ok_obs.txt", "1.5\n2.5\n3.5\n4.5\n");
  const CliRun both =
      run_cli("estimate --input " + ok.string() + " --method abm --m 2 --k 2");
  CHECK(both.exit_code == 2);
  CHECK(both.err.find("exactly one") != std::string::npos);

  const CliRun hill_m = run_cli("estimate --input " + ok.string() + " --method hill --m 2");
  CHECK(hill_m.exit_code == 2);

  const CliRun grid = run_cli("estimate --input " + ok.string() +
                              " --method abm --k-grid 5:1:2");
  CHECK(grid.exit_code == 2);
  fs::remove(ok);
}

TEST_CASE("cli: flag errors and domain errors both exit 2") {
  CHECK(run_cli("").exit_code == 2);                     // missing subcommand
  CHECK(run_cli("frobnicate").exit_code == 2);           // unknown subcommand
  CHECK(run_cli("weights --n 4").exit_code == 2);        // missing required flag
  CHECK(run_cli("weights --n 4 --m 9").exit_code == 2);  // m > n (library check)
  CHECK(run_cli("verify --what nonsense").exit_code == 2);
  CHECK(run_cli("simulate --out /tmp/x").exit_code == 2);  // no mode picked
}

TEST_CASE("cli: simulate experiment writes csv plus manifest") {
  const fs::path cfg = temp_file("abm_cli_cfg.json",
                                 R"({"dgp": "pareto", "gamma": 0.5, "n": 120,
                                     "k_grid": [4, 8], "reps": 5, "seed": 11,
                                     "name": "tiny"})");
  const fs::path dir = fs::temp_directory_path() / "abm_cli_run";
  fs::remove_all(dir);

  const CliRun r = run_cli("simulate --config " + cfg.string() + " --out " + dir.string());
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(dir / "cells.csv"));
  REQUIRE(fs::exists(dir / "manifest.json"));

  const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.at("content_hash") == hash_value(r.out));
  CHECK(manifest.at("base_seed") == 11);
  CHECK(manifest.at("config").at("name") == "tiny");
  CHECK(manifest.at("config").at("true_gamma") == 0.5);

  const abm::ResultTable cells = abm::read_csv_file(dir / "cells.csv");
  CHECK(cells.columns.front() == "method");
  CHECK(cells.rows.size() == 4);  // 2 methods x 1 n x 2 ks

  // reruns reproduce the hash; a new seed changes it; thread cap does not
  const CliRun same = run_cli("simulate --config " + cfg.string() + " --out " + dir.string());
  CHECK(hash_value(same.out) == hash_value(r.out));
  const CliRun one_thread = run_cli(
      "simulate --config " + cfg.string() + " --out " + dir.string(), "ABM_EVI_THREADS=1 ");
  CHECK(hash_value(one_thread.out) == hash_value(r.out));
  const CliRun reseeded = run_cli("simulate --config " + cfg.string() + " --out " +
                                  dir.string() + " --seed 12");
  CHECK(hash_value(reseeded.out) != hash_value(r.out));

  fs::remove_all(dir);
  fs::remove(cfg);
}

TEST_CASE("cli: implied variance run writes its table") {
  const fs::path dir = fs::temp_directory_path() / "abm_cli_implied";
  fs::remove_all(dir);
  const CliRun r = run_cli(
      "simulate --implied-variance --n-grid 300,600 --reps 20 --seed 3 --out " + dir.string());
  CHECK(r.exit_code == 0);
  const abm::ResultTable table = abm::read_csv_file(dir / "implied_variance.csv");
  CHECK(table.columns ==
        std::vector<std::string>{"n", "k", "m", "implied_asym_var", "reps_succeeded",
                                 "reps_failed"});
  REQUIRE(table.rows.size() == 2);
  CHECK(std::get<std::int64_t>(table.rows[0][0]) == 300);
  CHECK(std::get<std::int64_t>(table.rows[1][0]) == 600);
  fs::remove_all(dir);
}

TEST_CASE("cli: verify emits parseable json reports") {
  const CliRun mats = run_cli("verify --what matrices --gamma 2");
  CHECK(mats.exit_code == 0);
  const nlohmann::json m = nlohmann::json::parse(mats.out);
  CHECK(m.at("variance_constant").get<double>() == doctest::Approx(0.39274534899870283));
  CHECK(m.at("sigma_matrix")[1][1] == 0.5);

  const CliRun mc = run_cli("verify --what covariance-mc --reps 20000 --seed 1");
  CHECK(mc.exit_code == 0);
  const nlohmann::json c = nlohmann::json::parse(mc.out);
  CHECK(c.at("reps") == 20000);
  CHECK(c.at("max_se_ratio").get<double>() < 5.0);

  const CliRun vc = run_cli("verify --what variance-constant");
  CHECK(vc.exit_code == 0);
  const nlohmann::json v = nlohmann::json::parse(vc.out);
  REQUIRE(v.at("values").size() == 3);
  for (const auto& row : v.at("values"))
    CHECK(row.at("a").get<double>() == doctest::Approx(0.39274534899870283).epsilon(1e-12));
}
