#include "sbg/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sbg {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json report_to_json(const EstimateReport& rep, PayoffKind kind,
                              const std::string& mode, double epsilon) {
  nlohmann::json levels = nlohmann::json::array();
  for (const LevelReport& l : rep.per_level) {
    levels.push_back({{"j", l.level},
                      {"kappa_j", l.kappa},
                      {"n_j", l.n_sticks},
                      {"N_j", l.n_samples},
                      {"mean_Dj", l.mean},
                      {"var_Dj", l.variance},
                      {"cost_seconds", l.cost_seconds}});
  }
  const double value = post_transform(kind, rep.estimate);
  const double value_se = post_transform_se(kind, rep.estimate, rep.std_error);
  nlohmann::json out = {
      {"mode", mode},
      {"epsilon", epsilon},
      {"seed", rep.seed},
      {"estimate", rep.estimate},
      {"std_error", rep.std_error},
      {"value", value},
      {"value_std_error", value_se},
      {"overflow_count", rep.overflow_count},
      {"levels", levels},
      {"total_cost_seconds", rep.total_cost_seconds},
  };
  if (std::isnan(value)) out["warning"] = "negative estimate under sqrt";
  return out;
}

std::string levels_csv(const EstimateReport& rep) {
  std::string out = "j,kappa_j,n_j,N_j,mean_Dj,var_Dj,cost_seconds\n";
  for (const LevelReport& l : rep.per_level) {
    out += std::to_string(l.level) + ',' + fmt_double(l.kappa) + ',' +
           std::to_string(l.n_sticks) + ',' + std::to_string(l.n_samples) +
           ',' + fmt_double(l.mean) + ',' + fmt_double(l.variance) + ',' +
           fmt_double(l.cost_seconds) + '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace sbg
