#pragma once

#include "sbg/levy_models.hpp"
#include "sbg/payoffs.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbg {

/// Config rejected by schema validation; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScanConfig {
  double r = 0.5;   // kappa_j = e^{-r(j-1)}
  int j_min = 1;
  int j_max = 10;
  long long n_samples = 10000;
};

struct SpeedupConfig {
  std::vector<double> kappas;   // infinite-activity sweep
  std::vector<double> lambdas;  // jump-diffusion sweep (kappa = 0)
  std::vector<int> sticks;
  long long n_samples = 200;
};

struct ExperimentConfig {
  std::optional<LevyModel> model;
  std::optional<Payoff> payoff;
  double horizon = 1.0;
  std::string mode = "mc";  // "mc" | "mlmc"
  double epsilon = 0.01;
  std::uint64_t seed = 1;
  int workers = 1;
  long long n_override = -1;      // MC: fixed sample count
  double kappa_override = -1.0;   // MC: fixed cutoff
  int sticks_override = -1;
  int pilot = 1000;
  bool measured_cost = false;
  std::optional<ScanConfig> scan;
  std::optional<SpeedupConfig> speedup;
  std::string out_dir = ".";
};

/// Parses and schema-validates an experiment config. Unknown keys are
/// rejected; missing required keys are reported by name.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

LevyModel model_from_json(const nlohmann::json& doc);
Payoff payoff_from_json(const nlohmann::json& doc);

}  // namespace sbg
