#pragma once

#include "sbg/estimators.hpp"
#include "sbg/payoffs.hpp"

#include <json.hpp>

#include <string>

namespace sbg {

/// Report serialization. Cost fields are kept separate so byte-level
/// comparisons of two runs can strip them.
nlohmann::json report_to_json(const EstimateReport& rep, PayoffKind kind,
                              const std::string& mode, double epsilon);

/// Per-level CSV: "j,kappa_j,n_j,N_j,mean_Dj,var_Dj,cost_seconds",
/// LF-terminated, '.' decimals.
std::string levels_csv(const EstimateReport& rep);

/// Formats a double with enough digits to round-trip, locale-independent.
std::string fmt_double(double v);

void write_file(const std::string& path, const std::string& content);

}  // namespace sbg
