#include "sbg/config.hpp"

#include <fstream>
#include <set>

namespace sbg {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key))
      throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

const json& require_key(const json& j, const std::string& where,
                        const std::string& key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(where + ": missing required key \"" + key + "\"");
  return *it;
}

double num(const json& j, const std::string& where, const std::string& key,
           double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number())
    throw ConfigError(where + ": key \"" + key + "\" must be a number");
  return it->get<double>();
}

double require_num(const json& j, const std::string& where,
                   const std::string& key) {
  const json& v = require_key(j, where, key);
  if (!v.is_number())
    throw ConfigError(where + ": key \"" + key + "\" must be a number");
  return v.get<double>();
}

RegularityProfile regularity_from_json(const json& j, double sigma,
                                       const JumpMeasure& jumps) {
  RegularityProfile r = default_regularity(sigma, jumps);
  if (j.is_null()) return r;
  require_object(j, "model.regularity");
  check_keys(j, "model.regularity",
             {"beta", "q", "delta", "gamma_h", "c_h", "c_o", "k2"});
  r.beta = num(j, "model.regularity", "beta", r.beta);
  r.q = num(j, "model.regularity", "q", r.q);
  if (j.contains("delta")) r.delta = require_num(j, "model.regularity", "delta");
  if (j.contains("gamma_h"))
    r.gamma_h = require_num(j, "model.regularity", "gamma_h");
  r.c_h = num(j, "model.regularity", "c_h", r.c_h);
  r.c_o = num(j, "model.regularity", "c_o", r.c_o);
  r.k2 = num(j, "model.regularity", "k2", r.k2);
  return r;
}

}  // namespace

LevyModel model_from_json(const json& doc) {
  require_object(doc, "model");
  check_keys(doc, "model", {"sigma", "b", "jumps", "regularity"});
  const double sigma = require_num(doc, "model", "sigma");
  const double b = require_num(doc, "model", "b");
  const json& jj = require_key(doc, "model", "jumps");
  require_object(jj, "model.jumps");
  const json& kindj = require_key(jj, "model.jumps", "kind");
  if (!kindj.is_string())
    throw ConfigError("model.jumps: key \"kind\" must be a string");
  const std::string kind = kindj.get<std::string>();

  JumpMeasure jumps;
  if (kind == "tempered_stable") {
    check_keys(jj, "model.jumps",
               {"kind", "alpha_plus", "alpha_minus", "c_plus", "c_minus",
                "lambda_plus", "lambda_minus"});
    jumps = TemperedStableParams{
        require_num(jj, "model.jumps", "alpha_plus"),
        require_num(jj, "model.jumps", "alpha_minus"),
        require_num(jj, "model.jumps", "c_plus"),
        require_num(jj, "model.jumps", "c_minus"),
        require_num(jj, "model.jumps", "lambda_plus"),
        require_num(jj, "model.jumps", "lambda_minus")};
  } else if (kind == "watanabe") {
    check_keys(jj, "model.jumps", {"kind", "a", "c_plus", "c_minus"});
    jumps = WatanabeParams{
        static_cast<int>(require_num(jj, "model.jumps", "a")),
        require_num(jj, "model.jumps", "c_plus"),
        require_num(jj, "model.jumps", "c_minus")};
  } else if (kind == "merton") {
    check_keys(jj, "model.jumps", {"kind", "lambda", "jump_mean", "jump_std"});
    jumps = MertonParams{require_num(jj, "model.jumps", "lambda"),
                         require_num(jj, "model.jumps", "jump_mean"),
                         require_num(jj, "model.jumps", "jump_std")};
  } else if (kind == "kou") {
    check_keys(jj, "model.jumps",
               {"kind", "lambda", "p_up", "eta_plus", "eta_minus"});
    jumps = KouParams{require_num(jj, "model.jumps", "lambda"),
                      require_num(jj, "model.jumps", "p_up"),
                      require_num(jj, "model.jumps", "eta_plus"),
                      require_num(jj, "model.jumps", "eta_minus")};
  } else {
    throw ConfigError("model.jumps: unknown kind \"" + kind + "\"");
  }

  try {
    return LevyModel(sigma, b, jumps,
                     regularity_from_json(doc.value("regularity", json()),
                                          sigma, jumps));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

Payoff payoff_from_json(const json& doc) {
  require_object(doc, "payoff");
  check_keys(doc, "payoff",
             {"kind", "S0", "K", "M", "s", "log_strike", "log_barrier"});
  const json& kindj = require_key(doc, "payoff", "kind");
  if (!kindj.is_string())
    throw ConfigError("payoff: key \"kind\" must be a string");
  const std::string kind = kindj.get<std::string>();
  const double s0 = num(doc, "payoff", "S0", 1.0);
  if (!(s0 > 0.0)) throw ConfigError("payoff: S0 must be > 0");

  if (kind == "lookback_put") return Payoff::lookback_put(s0);
  if (kind == "up_and_out_call")
    return Payoff::up_and_out_call(require_num(doc, "payoff", "K"),
                                   require_num(doc, "payoff", "M"), s0);
  if (kind == "drawdown_sq") return Payoff::drawdown_sq(s0);
  if (kind == "drawdown_sq_before")
    return Payoff::drawdown_sq_before(require_num(doc, "payoff", "s"), s0);
  if (kind == "down_and_out_put")
    return Payoff::down_and_out_put(require_num(doc, "payoff", "log_strike"),
                                    require_num(doc, "payoff", "log_barrier"),
                                    s0);
  if (kind == "duration") return Payoff::duration(0.0);
  throw ConfigError("payoff: unknown kind \"" + kind + "\"");
}

ExperimentConfig parse_config(const json& doc) {
  require_object(doc, "config");
  check_keys(doc, "config",
             {"schema", "model", "payoff", "T", "mode", "eps", "seed",
              "workers", "N", "kappa", "n", "pilot", "measured_cost", "scan",
              "speedup", "out"});
  const json& schema = require_key(doc, "config", "schema");
  if (!schema.is_number_integer() || schema.get<int>() != 1)
    throw ConfigError("config: key \"schema\" must be the integer 1");

  ExperimentConfig cfg;
  cfg.model = model_from_json(require_key(doc, "config", "model"));
  if (doc.contains("payoff")) cfg.payoff = payoff_from_json(doc["payoff"]);
  cfg.horizon = num(doc, "config", "T", 1.0);
  if (!(cfg.horizon > 0.0)) throw ConfigError("config: T must be > 0");
  if (cfg.payoff && cfg.payoff->kind == PayoffKind::Duration)
    cfg.payoff->cls.bound_m = cfg.horizon;
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string())
      throw ConfigError("config: key \"mode\" must be a string");
    cfg.mode = doc["mode"].get<std::string>();
    if (cfg.mode != "mc" && cfg.mode != "mlmc")
      throw ConfigError("config: mode must be \"mc\" or \"mlmc\"");
  }
  cfg.epsilon = num(doc, "config", "eps", cfg.epsilon);
  if (!(cfg.epsilon > 0.0)) throw ConfigError("config: eps must be > 0");
  cfg.seed = static_cast<std::uint64_t>(num(doc, "config", "seed", 1.0));
  cfg.workers = static_cast<int>(num(doc, "config", "workers", 1.0));
  cfg.n_override = static_cast<long long>(num(doc, "config", "N", -1.0));
  cfg.kappa_override = num(doc, "config", "kappa", -1.0);
  cfg.sticks_override = static_cast<int>(num(doc, "config", "n", -1.0));
  cfg.pilot = static_cast<int>(num(doc, "config", "pilot", 1000.0));
  if (doc.contains("measured_cost")) {
    if (!doc["measured_cost"].is_boolean())
      throw ConfigError("config: key \"measured_cost\" must be a boolean");
    cfg.measured_cost = doc["measured_cost"].get<bool>();
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string())
      throw ConfigError("config: key \"out\" must be a string");
    cfg.out_dir = doc["out"].get<std::string>();
  }

  if (doc.contains("scan")) {
    const json& sj = doc["scan"];
    require_object(sj, "scan");
    check_keys(sj, "scan", {"r", "j_min", "j_max", "N"});
    ScanConfig sc;
    sc.r = require_num(sj, "scan", "r");
    sc.j_min = static_cast<int>(num(sj, "scan", "j_min", 1.0));
    sc.j_max = static_cast<int>(require_num(sj, "scan", "j_max"));
    sc.n_samples = static_cast<long long>(require_num(sj, "scan", "N"));
    if (sc.r <= 0.0 || sc.j_min < 1 || sc.j_max < sc.j_min || sc.n_samples < 2)
      throw ConfigError("scan: need r > 0, 1 <= j_min <= j_max, N >= 2");
    cfg.scan = sc;
  }
  if (doc.contains("speedup")) {
    const json& sj = doc["speedup"];
    require_object(sj, "speedup");
    check_keys(sj, "speedup", {"kappas", "lambdas", "sticks", "N"});
    SpeedupConfig sp;
    if (sj.contains("kappas"))
      sp.kappas = sj["kappas"].get<std::vector<double>>();
    if (sj.contains("lambdas"))
      sp.lambdas = sj["lambdas"].get<std::vector<double>>();
    sp.sticks = require_key(sj, "speedup", "sticks").get<std::vector<int>>();
    sp.n_samples = static_cast<long long>(require_num(sj, "speedup", "N"));
    if (sp.kappas.empty() == sp.lambdas.empty())
      throw ConfigError("speedup: give exactly one of \"kappas\", \"lambdas\"");
    cfg.speedup = sp;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace sbg
