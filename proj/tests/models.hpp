#pragma once

// Shared model fixtures for unit and acceptance tests. The two tempered
// stable parameter sets are the canonical configurations used throughout.

#include "sbg/levy_models.hpp"

namespace fixtures {

// Set 1: alpha = 0.66, asymmetric intensities/tempering, zero drift.
inline sbg::LevyModel ts_set1(double sigma = 0.0, double b = 0.0) {
  return sbg::LevyModel(
      sigma, b,
      sbg::TemperedStableParams{0.66, 0.66, 0.1305, 0.0615, 6.5022, 3.0888});
}

// Set 2: alpha = 1.0781, symmetric intensities, nonzero drift.
inline sbg::LevyModel ts_set2(double sigma = 0.0) {
  return sbg::LevyModel(sigma, 0.1274,
                        sbg::TemperedStableParams{1.0781, 1.0781, 0.41077,
                                                  0.41077, 49.663, 59.078});
}

inline sbg::LevyModel watanabe_unit(double b = 0.0) {
  return sbg::LevyModel(0.0, b, sbg::WatanabeParams{2, 1.0, 1.0});
}

inline sbg::LevyModel merton_jd(double lambda = 2.0, double sigma = 0.2) {
  return sbg::LevyModel(sigma, 0.0, sbg::MertonParams{lambda, 0.0, 0.1});
}

inline sbg::LevyModel kou_jd(double lambda = 2.0, double sigma = 0.2) {
  return sbg::LevyModel(sigma, 0.0, sbg::KouParams{lambda, 0.55, 12.0, 9.0});
}

}  // namespace fixtures
