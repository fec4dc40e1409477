#include "sbg/payoffs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbg {

namespace {
constexpr double kLogCap = 700.0;  // e^700 is the largest exponential we take
}

Orientation Payoff::orientation() const {
  switch (kind) {
    case PayoffKind::DownAndOutPut:
      return Orientation::Infimum;
    case PayoffKind::Custom:
      return custom_orientation;
    default:
      return Orientation::Supremum;
  }
}

Payoff Payoff::lookback_put(double s0) {
  Payoff p;
  p.kind = PayoffKind::LookbackPut;
  p.s0 = s0;
  p.cls = {PayoffClassTag::LocLip, s0, 1.0, 1.0, 0.0};
  return p;
}

Payoff Payoff::up_and_out_call(double strike, double barrier, double s0) {
  Payoff p;
  p.kind = PayoffKind::UpAndOutCall;
  p.s0 = s0;
  p.strike = strike;
  p.barrier = barrier;
  p.cls = {PayoffClassTag::BT1, strike, std::max(barrier - strike, 0.0), 1.0,
           -std::log(barrier / s0)};
  return p;
}

Payoff Payoff::drawdown_sq(double s0) {
  Payoff p;
  p.kind = PayoffKind::DrawdownSq;
  p.s0 = s0;
  p.cls = {PayoffClassTag::LocLip, 2.0, 1.0, 1.0, 0.0};
  return p;
}

Payoff Payoff::drawdown_sq_before(double threshold, double s0) {
  Payoff p;
  p.kind = PayoffKind::DrawdownSqBefore;
  p.s0 = s0;
  p.threshold = threshold;
  p.cls = {PayoffClassTag::BT2, 2.0, 1.0, 1.0, threshold};
  return p;
}

Payoff Payoff::down_and_out_put(double log_strike, double log_barrier,
                                double s0) {
  Payoff p;
  p.kind = PayoffKind::DownAndOutPut;
  p.s0 = s0;
  p.strike = log_strike;
  p.barrier = log_barrier;
  p.cls = {PayoffClassTag::BT1, std::exp(log_strike),
           std::exp(log_strike) - std::exp(log_barrier), 1.0, log_barrier};
  return p;
}

Payoff Payoff::duration(double horizon) {
  Payoff p;
  p.kind = PayoffKind::Duration;
  p.cls = {PayoffClassTag::LipTau, 1.0, horizon, 1.0, 0.0};
  return p;
}

bool overflows(const Payoff& payoff, const ExtremumTriplet& trip) {
  if (payoff.kind == PayoffKind::Duration || payoff.kind == PayoffKind::Custom)
    return false;
  return std::fabs(trip.terminal) > kLogCap || std::fabs(trip.extremum) > kLogCap;
}

double evaluate(const Payoff& payoff, const ExtremumTriplet& trip, double t) {
  if (payoff.kind != PayoffKind::Custom &&
      trip.orientation != payoff.orientation())
    throw std::domain_error("payoff: triplet orientation mismatch");
  const double x = trip.terminal;
  const double ext = trip.extremum;
  switch (payoff.kind) {
    case PayoffKind::LookbackPut:
      return payoff.s0 * (std::exp(ext) - std::exp(x));
    case PayoffKind::UpAndOutCall: {
      if (payoff.s0 * std::exp(ext) > payoff.barrier) return 0.0;
      return std::max(payoff.s0 * std::exp(x) - payoff.strike, 0.0);
    }
    case PayoffKind::DrawdownSq: {
      const double d = std::expm1(x - ext);
      return d * d;
    }
    case PayoffKind::DrawdownSqBefore: {
      if (!(trip.tau < payoff.threshold)) return 0.0;
      const double d = std::expm1(x - ext);
      return d * d;
    }
    case PayoffKind::DownAndOutPut: {
      if (ext < payoff.barrier) return 0.0;
      return payoff.s0 *
             std::max(std::exp(payoff.strike) - std::exp(x), 0.0);
    }
    case PayoffKind::Duration:
      return t - trip.tau;
    case PayoffKind::Custom:
      return payoff.custom(trip, t);
  }
  return 0.0;
}

double post_transform(PayoffKind kind, double estimate) {
  if (kind != PayoffKind::DrawdownSq && kind != PayoffKind::DrawdownSqBefore)
    return estimate;
  if (estimate < 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 100.0 * std::sqrt(estimate);
}

double post_transform_se(PayoffKind kind, double estimate, double se) {
  if (kind != PayoffKind::DrawdownSq && kind != PayoffKind::DrawdownSqBefore)
    return se;
  if (estimate < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (estimate == 0.0) return se == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  return 100.0 * se / (2.0 * std::sqrt(estimate));
}

}  // namespace sbg
