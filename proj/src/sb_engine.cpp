#include "sbg/sb_engine.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace sbg {

namespace {

struct LevelQuantities {
  double kappa = 0.0;
  double b = 0.0;        // b_kappa
  double upsilon = 0.0;  // sqrt(sigma^2 + sigma_bar_sq)
};

// Per-call context so the hot loops resolve the memoized cutoff cache and
// the tail-sampler constants exactly once.
struct CouplingContext {
  const LevyModel* model = nullptr;
  LevelQuantities coarse, fine;
  double nu_bar_fine = 0.0;
  bool degenerate = false;  // kappa1 == kappa2: shared draws, equal outputs
  std::optional<LevyModel::TailJumpSampler> tail;

  CouplingContext(const LevyModel& m, double kappa1, double kappa2)
      : model(&m) {
    if (kappa1 < kappa2)
      throw std::invalid_argument("cutoff ordering violated: kappa1 < kappa2");
    if (kappa1 > 1.0)
      throw std::invalid_argument("cutoff ordering violated: kappa1 > 1");
    const CutoffQuantities& q1 = m.cutoff(kappa1);
    const CutoffQuantities& q2 = m.cutoff(kappa2);
    const double s2 = m.sigma() * m.sigma();
    coarse = {kappa1, q1.b_kappa, std::sqrt(s2 + q1.sigma_bar_sq)};
    fine = {kappa2, q2.b_kappa, std::sqrt(s2 + q2.sigma_bar_sq)};
    nu_bar_fine = q2.nu_bar;
    degenerate = kappa1 == kappa2;
    if (nu_bar_fine > 0.0) tail.emplace(m, kappa2);
  }

  double draw_jump(RngStream& rng) const { return (*tail)(rng); }
};

// Drifted-Brownian triplet over [0,dt] at volatility ups, drift b; handles
// the deterministic ups = 0 case (pure drift) inline.
ExtremumTriplet interval_triplet(double dt, double ups, double b,
                                 RngStream& rng) {
  if (dt <= 0.0) return {};
  if (ups > 0.0) return sample_bm_min_triplet(dt, ups, b, rng);
  const double x = b * dt;
  if (b < 0.0) return {x, x, dt, Orientation::Infimum};
  if (b > 0.0) return {x, 0.0, 0.0, Orientation::Infimum};
  return {0.0, 0.0, dt, Orientation::Infimum};
}

std::pair<double, double> increments(const CouplingContext& ctx, double t,
                                     RngStream& rng) {
  const double w = std::sqrt(t) * rng.normal01();
  double jump_coarse = 0.0, jump_fine = 0.0;
  const std::uint64_t n = rng.poisson(ctx.nu_bar_fine * t);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double j = ctx.draw_jump(rng);
    jump_fine += j;
    if (std::fabs(j) >= ctx.coarse.kappa) jump_coarse += j;
  }
  return {ctx.coarse.b * t + ctx.coarse.upsilon * w + jump_coarse,
          ctx.fine.b * t + ctx.fine.upsilon * w + jump_fine};
}

CoupledPair jd_triplets(const CouplingContext& ctx, double t, RngStream& rng) {
  struct State {
    double z = 0.0, inf = 0.0, tau = 0.0;
  } st[2];
  const LevelQuantities* lq[2] = {&ctx.coarse, &ctx.fine};

  const std::uint64_t n = t > 0.0 ? rng.poisson(ctx.nu_bar_fine * t) : 0;
  // Jump times as normalized exponential cumulative sums scaled to [0,t];
  // small counts use a stack buffer.
  std::array<double, 64> small;
  std::vector<double> large;
  double* cum = small.data();
  if (n + 1 > small.size()) {
    large.resize(n + 1);
    cum = large.data();
  }
  double s = 0.0;
  for (std::uint64_t k = 0; k <= n; ++k) {
    s += rng.exponential();
    cum[k] = s;
  }
  double t_prev = 0.0;
  for (std::uint64_t k = 0; k <= n; ++k) {
    const double t_k = (k == n) ? t : t * (cum[k] / s);
    const double delta = t_k - t_prev;
    const double jump = (k < n) ? ctx.draw_jump(rng) : 0.0;
    ExtremumTriplet d[2];
    d[0] = interval_triplet(delta, lq[0]->upsilon, lq[0]->b, rng);
    d[1] = ctx.degenerate
               ? d[0]
               : interval_triplet(delta, lq[1]->upsilon, lq[1]->b, rng);
    for (int i = 0; i < 2; ++i) {
      if (st[i].inf > st[i].z + d[i].extremum) {
        st[i].inf = st[i].z + d[i].extremum;
        st[i].tau = t_prev + d[i].tau;
      }
      st[i].z += d[i].terminal;
      if (std::fabs(jump) >= lq[i]->kappa) st[i].z += jump;
    }
    t_prev = t_k;
  }
  CoupledPair out;
  out.coarse = {st[0].z, st[0].inf, st[0].tau, Orientation::Infimum};
  out.fine = {st[1].z, st[1].inf, st[1].tau, Orientation::Infimum};
  return out;
}

}  // namespace

StickBreaking stick_breaking_from_uniforms(double horizon,
                                           std::span<const double> uniforms) {
  StickBreaking sb;
  sb.horizon = horizon;
  sb.sticks.reserve(uniforms.size());
  double remaining = horizon;
  for (const double u : uniforms) {
    const double stick = remaining * u;
    sb.sticks.push_back(stick);
    remaining -= stick;
  }
  sb.remainder = remaining;
  return sb;
}

StickBreaking stick_breaking(double horizon, int n, RngStream& rng) {
  if (!(horizon > 0.0) || n < 0)
    throw std::invalid_argument("stick_breaking: need horizon > 0 and n >= 0");
  std::vector<double> us(static_cast<std::size_t>(n));
  for (auto& u : us) u = rng.uniform01();
  return stick_breaking_from_uniforms(horizon, us);
}

std::pair<double, double> coupled_increments(const LevyModel& model,
                                             double kappa1, double kappa2,
                                             double t, RngStream& rng) {
  if (!(t > 0.0)) throw std::invalid_argument("coupled_increments: t > 0");
  return increments(CouplingContext(model, kappa1, kappa2), t, rng);
}

CoupledPair coupled_jd_triplets(const LevyModel& model, double kappa1,
                                double kappa2, double t, RngStream& rng) {
  if (!(t > 0.0)) throw std::invalid_argument("coupled_jd_triplets: t > 0");
  CouplingContext ctx(model, kappa1, kappa2);
  // Algorithm semantics: one Brownian triplet per interval and per level,
  // drawn independently even when the cutoffs coincide.
  ctx.degenerate = false;
  return jd_triplets(ctx, t, rng);
}

CoupledPair sbg_coupled_triplets(const LevyModel& model, double kappa1,
                                 double kappa2, int n, double horizon,
                                 RngStream& rng) {
  if (!(horizon > 0.0) || n < 0)
    throw std::invalid_argument("sbg_coupled_triplets: need T > 0 and n >= 0");
  const CouplingContext ctx(model, kappa1, kappa2);

  double x[2] = {0.0, 0.0}, m[2] = {0.0, 0.0}, tau[2] = {0.0, 0.0};
  double remaining = horizon;
  for (int k = 0; k < n; ++k) {
    const double stick = remaining * rng.uniform01();
    remaining -= stick;
    if (stick <= 0.0) continue;  // underflowed stick contributes nothing
    const auto [xi_c, xi_f] = increments(ctx, stick, rng);
    const double xi[2] = {xi_c, xi_f};
    for (int i = 0; i < 2; ++i) {
      x[i] += xi[i];
      m[i] += std::min(xi[i], 0.0);
      if (xi[i] <= 0.0) tau[i] += stick;
    }
  }
  CoupledPair out = jd_triplets(ctx, remaining, rng);
  ExtremumTriplet* comp[2] = {&out.coarse, &out.fine};
  for (int i = 0; i < 2; ++i) {
    comp[i]->terminal += x[i];
    comp[i]->extremum += m[i];
    comp[i]->tau += tau[i];
  }
  return out;
}

ExtremumTriplet sample_triplet(const LevyModel& model, double kappa, int n,
                               double horizon, RngStream& rng) {
  return sbg_coupled_triplets(model, kappa, kappa, n, horizon, rng).fine;
}

}  // namespace sbg
