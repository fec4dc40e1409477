#pragma once

#include "sbg/error_bounds.hpp"
#include "sbg/extremum.hpp"

#include <functional>
#include <string>

namespace sbg {

enum class PayoffKind {
  LookbackPut,       // S0 (e^{Xbar} - e^X)
  UpAndOutCall,      // (S0 e^X - K)^+ 1{S0 e^{Xbar} <= M}
  DrawdownSq,        // (e^{X - Xbar} - 1)^2, the ulcer-index integrand
  DrawdownSqBefore,  // DrawdownSq * 1{taubar < s}
  DownAndOutPut,     // (e^k - e^X)^+ 1{Xlow >= y}, barrier on the infimum
  Duration,          // T - taubar
  Custom,
};

struct Payoff {
  PayoffKind kind = PayoffKind::LookbackPut;
  PayoffClass cls;
  double s0 = 1.0;
  double strike = 1.0;       // K (up-and-out); log-strike k (down-and-out)
  double barrier = 1.2;      // M (up-and-out); log-barrier y < 0 (down-and-out)
  double threshold = 0.0;    // s (DrawdownSqBefore)
  std::function<double(const ExtremumTriplet&, double)> custom;
  Orientation custom_orientation = Orientation::Supremum;

  /// The triplet orientation evaluate() expects for this kind.
  Orientation orientation() const;

  static Payoff lookback_put(double s0 = 1.0);
  static Payoff up_and_out_call(double strike, double barrier, double s0 = 1.0);
  static Payoff drawdown_sq(double s0 = 1.0);
  static Payoff drawdown_sq_before(double threshold, double s0 = 1.0);
  static Payoff down_and_out_put(double log_strike, double log_barrier,
                                 double s0 = 1.0);
  static Payoff duration(double horizon);
};

/// Evaluates the payoff on one extremum triplet. Throws std::domain_error on
/// orientation mismatch.
double evaluate(const Payoff& payoff, const ExtremumTriplet& trip, double t);

/// Guard for extreme draws: exponentials are capped at e^700; such draws are
/// rejected by the estimators and counted, never silently saturated.
bool overflows(const Payoff& payoff, const ExtremumTriplet& trip);

/// Ulcer-index style transform of an estimated expectation: 100 sqrt(e) for
/// the drawdown-squared kinds, identity otherwise. A negative estimate under
/// the square root yields NaN (MC noise; callers flag it).
double post_transform(PayoffKind kind, double estimate);

/// Standard error after post_transform, by the delta method.
double post_transform_se(PayoffKind kind, double estimate, double se);

}  // namespace sbg
