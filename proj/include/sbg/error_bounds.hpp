#pragma once

#include "sbg/levy_models.hpp"

#include <optional>

namespace sbg {

/// Payoff classes driving the bias / level-variance calculus.
enum class PayoffClassTag { Lip, LocLip, BT1, BT2, LipTau };

struct PayoffClass {
  PayoffClassTag tag = PayoffClassTag::Lip;
  double lipschitz_k = 1.0;
  double bound_m = 1.0;   // sup bound for the BT classes
  double gamma = 1.0;     // Holder exponent from Assumption (H)/(Htau)
  double barrier = 0.0;   // barrier y (BT1) or threshold s (BT2)
};

/// log^+(x) = max{log x, 0}; 0/0-type arguments are treated as 0.
double log_plus(double x);

/// Wasserstein bounds on the coupling of (X_t, inf X_t) with its Gaussian
/// approximation. Both vanish with the small-jump variance.
double mu1(const LevyModel& model, double kappa, double t);
double mu2(const LevyModel& model, double kappa, double t);

/// Bound on E|tau(X) - tau(X^(kappa))|: the smaller of the assumption-free
/// bound sqrt(t)(kappa/sigma_bar) phi^3 and the Orey-index bound, when delta
/// is declared. Infinite when neither applies.
double mu_tau_star(const LevyModel& model, double kappa, double t);
double mu_tau_star(const LevyModel& model, double kappa, double t,
                   std::optional<double> delta);

/// Class-specific bias bound at cutoff kappa (the B of the MLMC calculus,
/// also used to invert kappa(epsilon) for plain MC).
double bias_bound(const PayoffClass& cls, const LevyModel& model, double kappa,
                  double t);

struct LevelContext {
  double kappa_j = 1.0;
  double kappa_next = 1.0;  // kappa_{j+1}, enters the cost model
  int n_j = 0;
  double horizon = 1.0;
};

struct LevelBounds {
  double bias = 0.0;      // B(j)
  double variance = 0.0;  // V(j)
  double cost = 0.0;      // C(j) = n_j + nu_bar(kappa_{j+1}) T
};

/// Per-level bound functions feeding the MLMC planner.
LevelBounds level_bounds(const PayoffClass& cls, const LevyModel& model, int j,
                         const LevelContext& ctx);

}  // namespace sbg
