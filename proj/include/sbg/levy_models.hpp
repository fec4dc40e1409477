#pragma once

#include "sbg/random.hpp"

#include <memory>
#include <optional>
#include <utility>
#include <variant>

namespace sbg {

/// Two-sided tempered stable Levy measure
///   nu(dx) = c_sgn(x) |x|^{-1-alpha_sgn(x)} e^{-lambda_sgn(x) |x|} dx.
struct TemperedStableParams {
  double alpha_plus = 0.5;
  double alpha_minus = 0.5;
  double c_plus = 1.0;
  double c_minus = 1.0;
  double lambda_plus = 1.0;
  double lambda_minus = 1.0;
};

/// Atomic Levy measure nu = sum_{n>=1} c+ delta_{a^-n} + c- delta_{-a^-n}.
struct WatanabeParams {
  int a = 2;
  double c_plus = 1.0;
  double c_minus = 1.0;
};

/// Compound Poisson with N(jump_mean, jump_std^2) jumps, intensity lambda.
struct MertonParams {
  double lambda = 1.0;
  double jump_mean = 0.0;
  double jump_std = 0.1;
};

/// Compound Poisson with double-exponential jumps: up with probability p_up
/// and rate eta_plus, down with rate eta_minus; intensity lambda.
struct KouParams {
  double lambda = 1.0;
  double p_up = 0.5;
  double eta_plus = 10.0;
  double eta_minus = 10.0;
};

using JumpMeasure =
    std::variant<TemperedStableParams, WatanabeParams, MertonParams, KouParams>;

/// Regularity knobs for the bound calculus. The unknown universal constants
/// (c_o for the psi_kappa bound, k2 for the second Wasserstein moment) default
/// to 1 and only shift bound constants, never rates.
struct RegularityProfile {
  double beta = 0.0;                    // Blumenthal-Getoor index, in [0,2]
  double q = 0.5;                       // moment exponent, q >= beta, in (0,2]
  std::optional<double> delta;          // Orey index in (0,2]; 2 when sigma != 0
  std::optional<double> gamma_h = 1.0;  // Assumption (H)/(Htau) exponent
  double c_h = 1.0;
  double c_o = 1.0;
  double k2 = 1.0;
};

struct CutoffQuantities {
  double kappa = 1.0;
  double b_kappa = 0.0;       // b - int_{(-1,1)\(-k,k)} x nu(dx)
  double sigma_bar_sq = 0.0;  // int_{(-k,k)\{0}} x^2 nu(dx)
  double nu_bar = 0.0;        // nu(R \ (-k,k))
  double nu_bar_up = 0.0;     // nu([k,inf)), cached for the tail sampler
  double phi = 0.0;           // sigma_bar / sqrt(sigma_bar_sq + sigma^2)
};

namespace detail {
struct CutoffCache;
}

/// Immutable Levy triplet (sigma^2, nu, b) with the cutoff-level quantities
/// the samplers and the bound calculus need. Cutoff quantities are memoized
/// per kappa; the cache is safe for concurrent use.
class LevyModel {
 public:
  LevyModel(double sigma, double drift_b, JumpMeasure jumps);
  LevyModel(double sigma, double drift_b, JumpMeasure jumps,
            RegularityProfile reg);

  double sigma() const { return sigma_; }
  double drift() const { return b_; }
  const JumpMeasure& jumps() const { return jumps_; }
  const RegularityProfile& regularity() const { return reg_; }

  /// True when nu(R \ {0}) < infinity (Merton/Kou); only then is kappa = 0
  /// admissible.
  bool finite_activity() const;

  /// All cutoff-dependent quantities at level kappa in (0,1], or kappa = 0
  /// for finite-activity models. Throws std::invalid_argument otherwise.
  const CutoffQuantities& cutoff(double kappa) const;

  /// One draw from nu restricted to R \ (-kappa,kappa), normalized.
  /// Requires nu_bar(kappa) > 0.
  double sample_tail_jump(double kappa, RngStream& rng) const;

  /// Prepared form of sample_tail_jump for hot loops: all cutoff-derived
  /// constants are resolved once at construction.
  class TailJumpSampler {
   public:
    TailJumpSampler(const LevyModel& model, double kappa);
    double operator()(RngStream& rng) const;

   private:
    const JumpMeasure* jumps_;
    double kappa_;
    double p_up_;  // probability of a positive jump
    int watanabe_nmax_ = 0;
  };
  TailJumpSampler tail_sampler(double kappa) const {
    return TailJumpSampler(*this, kappa);
  }

  /// Mean and variance of the Gaussian approximation increment X^(kappa)_t.
  std::pair<double, double> approx_moments(double kappa, double t) const;

  /// The model of -X: drift negated, jump measure mirrored, same sigma.
  LevyModel reflect() const;

  /// int_{(-1,1)\{0}} |x|^q nu(dx); finite for q > beta.
  double i0q(double q) const;

  /// Normalized tail CDF x -> nu((-inf,x] \ (-kappa,kappa)) / nu_bar(kappa).
  double tail_cdf(double kappa, double x) const;

 private:
  void validate() const;

  double sigma_;
  double b_;
  JumpMeasure jumps_;
  RegularityProfile reg_;
  std::shared_ptr<detail::CutoffCache> cache_;
};

/// Driftless-jump convenience: a Brownian motion with drift, expressed as a
/// Merton model with zero jump intensity.
LevyModel pure_brownian(double sigma, double b);

/// Default regularity for a given triplet, following the usual choices:
/// for tempered stable with sigma = 0, delta = q = beta = max(alpha+,alpha-);
/// delta = 2 whenever sigma != 0; gamma_h = 1.
RegularityProfile default_regularity(double sigma, const JumpMeasure& jumps);

}  // namespace sbg
