#pragma once

#include "sbg/brownian_triplet.hpp"
#include "sbg/extremum.hpp"
#include "sbg/levy_models.hpp"
#include "sbg/random.hpp"

#include <span>
#include <utility>
#include <vector>

namespace sbg {

/// Recursive uniform subdivision of [0,T]: l_k = U_k L_{k-1},
/// L_k = L_{k-1} - l_k.
struct StickBreaking {
  double horizon = 0.0;
  std::vector<double> sticks;  // l_1 .. l_n
  double remainder = 0.0;      // L_n
};

StickBreaking stick_breaking(double horizon, int n, RngStream& rng);

/// Deterministic kernel used by stick_breaking; exposed so tests can force
/// the uniforms.
StickBreaking stick_breaking_from_uniforms(double horizon,
                                           std::span<const double> uniforms);

/// Coupled extremum triplets at two cutoff levels built over shared
/// randomness; both components are marginally distributed as the Gaussian
/// approximation triplet at their cutoff.
struct CoupledPair {
  ExtremumTriplet coarse;  // cutoff kappa1
  ExtremumTriplet fine;    // cutoff kappa2 <= kappa1
};

/// One draw of the coupled increment pair (Z^(k1)_t, Z^(k2)_t): a shared
/// Normal(0,t) draw, a shared Poisson jump count at intensity nu_bar(k2) t,
/// jumps from the k2-tail thinned at k1.
std::pair<double, double> coupled_increments(const LevyModel& model,
                                             double kappa1, double kappa2,
                                             double t, RngStream& rng);

/// One draw of the coupled jump-diffusion triplet pair over [0,t]: Poisson
/// jump times, an independent drifted-Brownian triplet per inter-jump
/// interval and per level, jumps thinned at kappa1. Sequential by
/// construction.
CoupledPair coupled_jd_triplets(const LevyModel& model, double kappa1,
                                double kappa2, double t, RngStream& rng);

/// The SBG sampler: coupled increments over n stick-breaking lengths plus a
/// coupled jump-diffusion triplet over the remainder [0, L_n], assembled
/// component-wise. With n = 0 the law coincides with coupled_jd_triplets.
CoupledPair sbg_coupled_triplets(const LevyModel& model, double kappa1,
                                 double kappa2, int n, double horizon,
                                 RngStream& rng);

/// Single-level convenience: the degenerate coupling at kappa1 = kappa2.
ExtremumTriplet sample_triplet(const LevyModel& model, double kappa, int n,
                               double horizon, RngStream& rng);

}  // namespace sbg
