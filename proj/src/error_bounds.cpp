#include "sbg/error_bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double log_plus(double x) {
  if (!(x > 1.0)) return 0.0;  // covers x <= 1, NaN and 0/0 artifacts
  return std::log(x);
}

double mu1(const LevyModel& model, double kappa, double t) {
  const CutoffQuantities& q = model.cutoff(kappa);
  const double sb = std::sqrt(q.sigma_bar_sq);
  if (sb == 0.0) return 0.0;
  const double phi = q.phi;
  const double root2t = std::sqrt(2.0 * t);
  const double lead = std::min(2.0 * root2t * sb, kappa * phi * phi);
  return lead *
         (1.0 + log_plus(2.0 * root2t * (sb / kappa) / (phi * phi)));
}

double mu2(const LevyModel& model, double kappa, double t) {
  const CutoffQuantities& q = model.cutoff(kappa);
  const double sb = std::sqrt(q.sigma_bar_sq);
  if (sb == 0.0) return 0.0;
  const double phi = q.phi;
  const double k2 = model.regularity().k2;
  const double root2t = std::sqrt(2.0 * t);
  const double lead = std::min(root2t * sb, k2 * kappa * phi);
  return std::sqrt(2.0) * mu1(model, kappa, t) +
         lead * std::sqrt(1.0 + 2.0 * log_plus(root2t * (sb / kappa) /
                                               (k2 * phi)));
}

namespace {

// Orey-index bound on the expected argmin displacement; psi = C kappa phi.
double mu_tau_delta(double psi, double t, double delta) {
  if (psi <= 0.0) return 0.0;
  if (delta == 2.0 / 3.0) {
    const double p = std::pow(psi, 2.0 / 3.0);
    return std::min(t, p) * (1.0 + log_plus(t / p));
  }
  const double head = std::min(t, std::pow(psi, delta));
  const double clipped = std::min(1.0, std::pow(t, -1.0 / delta) * psi);
  const double tail = std::pow(t, 1.0 - 2.0 / (3.0 * delta)) *
                      std::pow(psi, 2.0 / 3.0) *
                      (1.0 - std::pow(clipped, delta - 2.0 / 3.0));
  return head + tail;
}

}  // namespace

double mu_tau_star(const LevyModel& model, double kappa, double t,
                   std::optional<double> delta) {
  const CutoffQuantities& q = model.cutoff(kappa);
  const double sb = std::sqrt(q.sigma_bar_sq);
  double best = kInf;
  if (sb > 0.0) {
    best = std::sqrt(t) * (kappa / sb) * q.phi * q.phi * q.phi;
  }
  if (delta) {
    const double psi = model.regularity().c_o * kappa * q.phi;
    best = std::min(best, mu_tau_delta(psi, t, *delta));
  }
  if (sb == 0.0 && !delta) return kInf;
  return best;
}

double mu_tau_star(const LevyModel& model, double kappa, double t) {
  return mu_tau_star(model, kappa, t, model.regularity().delta);
}

double bias_bound(const PayoffClass& cls, const LevyModel& model, double kappa,
                  double t) {
  switch (cls.tag) {
    case PayoffClassTag::Lip:
      return mu1(model, kappa, t);
    case PayoffClassTag::LocLip:
      return mu2(model, kappa, t);
    case PayoffClassTag::BT1: {
      const double g = cls.gamma;
      const double m1 = mu1(model, kappa, t);
      const double m2 = mu2(model, kappa, t);
      return std::min(std::pow(m1, g / (1.0 + g)),
                      std::pow(m2, 2.0 * g / (2.0 + g)));
    }
    case PayoffClassTag::LipTau:
      return mu_tau_star(model, kappa, t);
    case PayoffClassTag::BT2:
      return std::sqrt(mu_tau_star(model, kappa, t));
  }
  return kInf;
}

LevelBounds level_bounds(const PayoffClass& cls, const LevyModel& model, int j,
                         const LevelContext& ctx) {
  if (j < 1) throw std::invalid_argument("level_bounds: j must be >= 1");
  const CutoffQuantities& q = model.cutoff(ctx.kappa_j);
  const double sigma = model.sigma();
  const double sb_sq = q.sigma_bar_sq;
  const double sb = std::sqrt(sb_sq);
  const double n = static_cast<double>(ctx.n_j);
  const std::optional<double> delta = model.regularity().delta;

  LevelBounds out;
  out.bias = bias_bound(cls, model, ctx.kappa_j, ctx.horizon);
  out.cost = n + model.cutoff(ctx.kappa_next).nu_bar * ctx.horizon;

  const auto require_delta = [&]() -> double {
    if (!delta)
      throw std::invalid_argument(
          "level_bounds: class requires the Orey index delta");
    return *delta;
  };

  switch (cls.tag) {
    case PayoffClassTag::Lip:
      out.variance = sigma * sigma * std::exp2(-n) + sb_sq;
      break;
    case PayoffClassTag::LocLip:
      out.variance = (sigma != 0.0 ? std::pow(2.0 / 3.0, 0.5 * n) : 0.0) +
                     sb_sq + sb * ctx.kappa_j;
      break;
    case PayoffClassTag::BT1: {
      const double e = 2.0 * cls.gamma / (2.0 + cls.gamma);
      out.variance = std::pow(sigma, e) * std::pow(2.0, -n * e / 2.0) +
                     std::pow(sb, e);
      break;
    }
    case PayoffClassTag::LipTau: {
      const double d = require_delta();
      const double e = d < 2.0 ? std::min(0.5, 2.0 * d / (2.0 - d)) : 0.5;
      const double logf =
          d == 0.4 ? 1.0 + std::fabs(std::log(ctx.kappa_j)) : 1.0;
      out.variance = std::exp2(-n) + std::pow(sb, e) * logf;
      break;
    }
    case PayoffClassTag::BT2: {
      const double d = require_delta();
      const double e = d < 2.0 ? std::min(0.25, d / (2.0 - d)) : 0.25;
      const double logf =
          d == 0.4 ? 1.0 + std::sqrt(std::fabs(std::log(ctx.kappa_j))) : 1.0;
      out.variance = std::exp2(-0.5 * n) + std::pow(sb, e) * logf;
      break;
    }
  }
  return out;
}

}  // namespace sbg
