#pragma once

#include "sbg/extremum.hpp"
#include "sbg/random.hpp"

namespace sbg {

/// Exact sample of (B*_t, inf_{s<=t} B*_s, argmin) for B*_s = v B_s + mu s.
///
/// Three exact steps: the terminal value is Normal(mu t, v^2 t); given the
/// terminal value the bridge is drift-free, so the infimum follows the
/// reflection law  P(inf <= m | terminal) = exp(-2 m (m - terminal)/(v^2 t)),
/// inverted in closed form; given (infimum, terminal) the argmin density on
/// (0,t) is the product of two first-passage kernels, sampled exactly as a
/// two-component inverse-Gaussian mixture after the substitution
/// s = t/(1+w).
///
/// Requires t > 0 and v > 0 (throws std::invalid_argument otherwise).
ExtremumTriplet sample_bm_min_triplet(double t, double v, double mu,
                                      RngStream& rng);

/// CDF of the infimum of a drifted Brownian motion on [0,t] (reflection
/// principle); used as a distributional oracle in tests and validation.
double bm_inf_cdf(double t, double v, double mu, double x);

}  // namespace sbg
