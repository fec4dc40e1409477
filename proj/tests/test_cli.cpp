#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#ifndef SBG_CLI_PATH
#define SBG_CLI_PATH "./sbg"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("sbg_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(SBG_CLI_PATH) + " " + args +
                          " > /dev/null 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json merton_config(const fs::path& out) {
  return json{
      {"schema", 1},
      {"model",
       {{"sigma", 0.2},
        {"b", 0.0},
        {"jumps",
         {{"kind", "merton"}, {"lambda", 2.0}, {"jump_mean", 0.0},
          {"jump_std", 0.1}}}}},
      {"payoff", {{"kind", "lookback_put"}, {"S0", 1.0}}},
      {"T", 1.0},
      {"mode", "mc"},
      {"kappa", 0.0},
      {"N", 20000},
      {"eps", 0.05},
      {"seed", 11},
      {"out", out.string()},
  };
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  out << j.dump(2);
}

// cost fields change run to run; strip them before comparing reports
json strip_costs(json j) {
  j.erase("total_cost_seconds");
  for (auto& l : j["levels"]) l.erase("cost_seconds");
  return j;
}

}  // namespace

TEST_CASE("mlmc estimate meets the requested accuracy budget") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "cfg.json";
  json doc = merton_config(tmp.path / "ml");
  doc["mode"] = "mlmc";
  doc["eps"] = 0.05;
  doc.erase("N");
  doc.erase("kappa");
  write_json(cfg_path, doc);
  REQUIRE(run("estimate --config " + cfg_path.string()) == 0);
  const json rep = json::parse(slurp(tmp.path / "ml/report.json"));
  // variance budget eps^2/2, with slack for the pilot-based V estimates
  CHECK(rep["std_error"].get<double>() <= 1.5 * 0.05 / std::sqrt(2.0));
  CHECK(rep["levels"].size() >= 1);
}

TEST_CASE("estimate writes report.json and levels.csv deterministically") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "cfg.json";
  write_json(cfg_path, merton_config(tmp.path / "run1"));
  REQUIRE(run("estimate --config " + cfg_path.string()) == 0);

  write_json(cfg_path, merton_config(tmp.path / "run2"));
  REQUIRE(run("estimate --config " + cfg_path.string()) == 0);

  const json r1 = json::parse(slurp(tmp.path / "run1/report.json"));
  const json r2 = json::parse(slurp(tmp.path / "run2/report.json"));
  CHECK(strip_costs(r1) == strip_costs(r2));
  CHECK(r1["estimate"].is_number());
  CHECK(r1["levels"].size() == 1);

  const std::string csv = slurp(tmp.path / "run1/levels.csv");
  CHECK(csv.rfind("j,kappa_j,n_j,N_j,mean_Dj,var_Dj,cost_seconds\n", 0) == 0);
  CHECK(csv.back() == '\n');
  CHECK(csv.find(',') != std::string::npos);
}

TEST_CASE("config errors exit with code 2 and name the key") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "bad.json";
  json doc = merton_config(tmp.path / "out");
  doc.erase("model");
  write_json(cfg_path, doc);
  const std::string cmd = std::string(SBG_CLI_PATH) + " estimate --config " +
                          cfg_path.string() + " > /dev/null 2> " +
                          (tmp.path / "err.txt").string();
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  CHECK(slurp(tmp.path / "err.txt").find("\"model\"") != std::string::npos);

  write_json(cfg_path, json{{"schema", 1}});
  CHECK(run("estimate --config " + cfg_path.string()) == 2);
}

TEST_CASE("infeasible accuracy exits with code 3") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "cfg.json";
  json doc = json{
      {"schema", 1},
      {"model",
       {{"sigma", 0.0},
        {"b", 0.0},
        {"jumps",
         {{"kind", "tempered_stable"},
          {"alpha_plus", 0.66},
          {"alpha_minus", 0.66},
          {"c_plus", 0.1305},
          {"c_minus", 0.0615},
          {"lambda_plus", 6.5022},
          {"lambda_minus", 3.0888}}}}},
      {"payoff", {{"kind", "lookback_put"}, {"S0", 1.0}}},
      {"T", 1.0 / 6.0},
      {"mode", "mc"},
      {"eps", 1e-14},
      {"seed", 1},
      {"out", (tmp.path / "out").string()},
  };
  write_json(cfg_path, doc);
  CHECK(run("estimate --config " + cfg_path.string()) == 3);
}

TEST_CASE("scan emits the plot-ready CSV") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "cfg.json";
  json doc = merton_config(tmp.path / "scan_out");
  doc["scan"] = {{"r", 0.5}, {"j_min", 1}, {"j_max", 3}, {"N", 500}};
  write_json(cfg_path, doc);
  REQUIRE(run("scan --config " + cfg_path.string()) == 0);
  const std::string csv = slurp(tmp.path / "scan_out/scan.csv");
  CHECK(csv.rfind("j,log_kappa,log_abs_mean_Dj,log_var_Dj,"
                  "theory_bias_slope_line,theory_var_slope_line\n",
                  0) == 0);
  // three data rows, LF line endings, no NaNs at the first grid point
  int lines = 0;
  for (const char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 4);
  CHECK(csv.find("nan") == std::string::npos);
}

TEST_CASE("speedup emits one row per (value, sticks) pair") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "cfg.json";
  json doc = merton_config(tmp.path / "sp_out");
  doc.erase("payoff");
  doc["speedup"] = {{"lambdas", {1.0, 2.0}}, {"sticks", {0, 5}}, {"N", 50}};
  write_json(cfg_path, doc);
  REQUIRE(run("speedup --config " + cfg_path.string()) == 0);
  const std::string csv = slurp(tmp.path / "sp_out/speedup.csv");
  CHECK(csv.rfind("sweep,value,n,alg2_seconds,sbg_seconds,ratio\n", 0) == 0);
  int lines = 0;
  for (const char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 5);
}

TEST_CASE("validate passes its statistical suite") {
  CHECK(run("validate --seed 5") == 0);
}
