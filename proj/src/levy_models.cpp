#include "sbg/levy_models.hpp"

#include "sbg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <shared_mutex>
#include <stdexcept>

namespace sbg {

namespace detail {
struct CutoffCache {
  mutable std::shared_mutex mu;
  mutable std::map<double, CutoffQuantities> entries;
};
}  // namespace detail

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }
double norm_pdf(double x) {
  return 0.39894228040143267794 * std::exp(-0.5 * x * x);
}

// --- tempered stable primitives -------------------------------------------

// c * int_a^b x^{p-1-alpha} e^{-lambda x} dx for 0 <= a < b.
// For a = 0 the integrand may be singular; the substitution x = b u^{1/(p-a)}
// removes the singularity exactly.
double ts_partial(double c, double alpha, double lambda, double p, double a,
                  double b) {
  if (c == 0.0 || a >= b) return 0.0;
  const auto f = [=](double x) {
    return std::pow(x, p - 1.0 - alpha) * std::exp(-lambda * x);
  };
  if (a > 0.0) {
    if (std::isinf(b)) return c * integrate_to_inf(f, a);
    return c * integrate(f, a, b);
  }
  const double s = p - alpha;  // > 0 for the moments we use
  const double inv_s = 1.0 / s;
  const auto g = [=](double u) {
    return std::exp(-lambda * b * std::pow(u, inv_s));
  };
  return c * std::pow(b, s) * inv_s * integrate(g, 0.0, 1.0);
}

// --- Watanabe primitives ----------------------------------------------------

// Largest n >= 1 with a^{-n} >= kappa (0 if none, i.e. kappa > 1/a).
int watanabe_nmax(const WatanabeParams& w, double kappa) {
  if (kappa <= 0.0) throw std::invalid_argument("watanabe: kappa must be > 0");
  const double la = std::log(static_cast<double>(w.a));
  int n = static_cast<int>(std::floor(std::log(1.0 / kappa) / la));
  while (std::pow(static_cast<double>(w.a), -(n + 1)) >= kappa) ++n;
  while (n >= 1 && std::pow(static_cast<double>(w.a), -n) < kappa) --n;
  return std::max(n, 0);
}

// sum_{n=1}^{N} r^n and sum_{n=N+1}^inf r^n for r = a^{-p}.
double geom_head(double r, int n) {
  if (n <= 0) return 0.0;
  return r * (1.0 - std::pow(r, n)) / (1.0 - r);
}
double geom_tail_from(double r, int first) {
  return std::pow(r, first) / (1.0 - r);
}

// --- normal partial moments -------------------------------------------------

// int_a^b x^k phi_{m,s}(x) dx for k = 0,1,2 (a,b may be +-inf).
double normal_pm(int k, double m, double s, double a, double b) {
  const double alpha = std::isinf(a) ? a : (a - m) / s;
  const double beta = std::isinf(b) ? b : (b - m) / s;
  const double Fa = std::isinf(alpha) ? (alpha > 0 ? 1.0 : 0.0) : norm_cdf(alpha);
  const double Fb = std::isinf(beta) ? (beta > 0 ? 1.0 : 0.0) : norm_cdf(beta);
  const double fa = std::isinf(alpha) ? 0.0 : norm_pdf(alpha);
  const double fb = std::isinf(beta) ? 0.0 : norm_pdf(beta);
  const double p0 = Fb - Fa;
  if (k == 0) return p0;
  const double p1 = m * p0 + s * (fa - fb);
  if (k == 1) return p1;
  const double afa = std::isinf(alpha) ? 0.0 : alpha * fa;
  const double bfb = std::isinf(beta) ? 0.0 : beta * fb;
  return m * m * p0 + 2.0 * m * s * (fa - fb) + s * s * (p0 + afa - bfb);
}

// --- Kou (exponential) partial moments --------------------------------------

// int_a^b x^k eta e^{-eta x} dx on 0 <= a < b (b may be inf).
double exp_pm(int k, double eta, double a, double b) {
  const auto upper = [=](double c) {  // int_c^inf
    const double e = std::exp(-eta * c);
    if (k == 0) return e;
    if (k == 1) return e * (c + 1.0 / eta);
    return e * (c * c + 2.0 * c / eta + 2.0 / (eta * eta));
  };
  return upper(a) - (std::isinf(b) ? 0.0 : upper(b));
}

struct TailMoments {
  double mass = 0.0;    // nu(R \ (-k,k))
  double mean = 0.0;    // int_{|x|>=k} x nu(dx)
  double x2 = 0.0;      // int_{|x|>=k} x^2 nu(dx)
  double comp = 0.0;    // int_{(-1,1)\(-k,k)} x nu(dx)
  double mass_up = 0.0; // nu([k,inf))
};

}  // namespace

RegularityProfile default_regularity(double sigma, const JumpMeasure& jumps) {
  RegularityProfile r;
  r.gamma_h = 1.0;
  if (const auto* ts = std::get_if<TemperedStableParams>(&jumps)) {
    r.beta = std::max(ts->alpha_plus, ts->alpha_minus);
    r.q = std::max(r.beta, 0.25);
  } else {
    r.beta = 0.0;
    r.q = 0.5;
  }
  if (sigma != 0.0) {
    r.delta = 2.0;
  } else if (std::holds_alternative<TemperedStableParams>(jumps) &&
             r.beta > 0.0) {
    r.delta = r.beta;
  }
  return r;
}

LevyModel::LevyModel(double sigma, double drift_b, JumpMeasure jumps)
    : LevyModel(sigma, drift_b, jumps, default_regularity(sigma, jumps)) {}

LevyModel::LevyModel(double sigma, double drift_b, JumpMeasure jumps,
                     RegularityProfile reg)
    : sigma_(sigma),
      b_(drift_b),
      jumps_(std::move(jumps)),
      reg_(reg),
      cache_(std::make_shared<detail::CutoffCache>()) {
  validate();
}

void LevyModel::validate() const {
  if (sigma_ < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (reg_.q <= 0.0 || reg_.q > 2.0)
    throw std::invalid_argument("regularity: q must lie in (0,2]");
  if (reg_.q < reg_.beta)
    throw std::invalid_argument("regularity: q must be >= beta");
  if (reg_.delta && (*reg_.delta <= 0.0 || *reg_.delta > 2.0))
    throw std::invalid_argument("regularity: delta must lie in (0,2]");
  std::visit(
      [](const auto& j) {
        using T = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<T, TemperedStableParams>) {
          if (j.alpha_plus < 0 || j.alpha_plus >= 2 || j.alpha_minus < 0 ||
              j.alpha_minus >= 2)
            throw std::invalid_argument("tempered stable: alpha in [0,2)");
          if (j.c_plus < 0 || j.c_minus < 0 || j.c_plus + j.c_minus <= 0)
            throw std::invalid_argument("tempered stable: need c+ or c- > 0");
          if (j.lambda_plus <= 0 || j.lambda_minus <= 0)
            throw std::invalid_argument("tempered stable: lambda must be > 0");
        } else if constexpr (std::is_same_v<T, WatanabeParams>) {
          if (j.a < 2) throw std::invalid_argument("watanabe: a must be >= 2");
          if (j.c_plus < 0 || j.c_minus < 0)
            throw std::invalid_argument("watanabe: c must be >= 0");
        } else if constexpr (std::is_same_v<T, MertonParams>) {
          if (j.lambda < 0) throw std::invalid_argument("merton: lambda >= 0");
          if (j.lambda > 0 && j.jump_std <= 0)
            throw std::invalid_argument("merton: jump_std must be > 0");
        } else if constexpr (std::is_same_v<T, KouParams>) {
          if (j.lambda < 0) throw std::invalid_argument("kou: lambda >= 0");
          if (j.p_up < 0 || j.p_up > 1)
            throw std::invalid_argument("kou: p_up in [0,1]");
          if (j.eta_plus <= 0 || j.eta_minus <= 0)
            throw std::invalid_argument("kou: eta must be > 0");
        }
      },
      jumps_);
}

bool LevyModel::finite_activity() const {
  return std::holds_alternative<MertonParams>(jumps_) ||
         std::holds_alternative<KouParams>(jumps_);
}

namespace {

TailMoments tail_moments(const JumpMeasure& jumps, double kappa) {
  TailMoments t;
  std::visit(
      [&](const auto& j) {
        using T = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<T, TemperedStableParams>) {
          const double inf = std::numeric_limits<double>::infinity();
          const double mp =
              ts_partial(j.c_plus, j.alpha_plus, j.lambda_plus, 0, kappa, inf);
          const double mm = ts_partial(j.c_minus, j.alpha_minus,
                                       j.lambda_minus, 0, kappa, inf);
          t.mass = mp + mm;
          t.mass_up = mp;
          t.mean =
              ts_partial(j.c_plus, j.alpha_plus, j.lambda_plus, 1, kappa, inf) -
              ts_partial(j.c_minus, j.alpha_minus, j.lambda_minus, 1, kappa,
                         inf);
          t.x2 =
              ts_partial(j.c_plus, j.alpha_plus, j.lambda_plus, 2, kappa, inf) +
              ts_partial(j.c_minus, j.alpha_minus, j.lambda_minus, 2, kappa,
                         inf);
          if (kappa < 1.0) {
            t.comp = ts_partial(j.c_plus, j.alpha_plus, j.lambda_plus, 1, kappa,
                                1.0) -
                     ts_partial(j.c_minus, j.alpha_minus, j.lambda_minus, 1,
                                kappa, 1.0);
          }
        } else if constexpr (std::is_same_v<T, WatanabeParams>) {
          const int nmax = watanabe_nmax(j, kappa);
          const double r1 = 1.0 / j.a;
          const double s1 = geom_head(r1, nmax);
          const double s2 = geom_head(r1 * r1, nmax);
          t.mass = (j.c_plus + j.c_minus) * nmax;
          t.mass_up = j.c_plus * nmax;
          t.mean = (j.c_plus - j.c_minus) * s1;
          t.x2 = (j.c_plus + j.c_minus) * s2;
          t.comp = t.mean;  // all atoms lie strictly inside (-1,1)
        } else if constexpr (std::is_same_v<T, MertonParams>) {
          const double inf = std::numeric_limits<double>::infinity();
          const double m = j.jump_mean, s = j.jump_std, lam = j.lambda;
          if (lam == 0.0) return;
          if (kappa == 0.0) {
            t.mass = lam;
            t.mass_up = lam * normal_pm(0, m, s, 0.0, inf);
            t.mean = lam * m;
            t.x2 = lam * (m * m + s * s);
            t.comp = lam * normal_pm(1, m, s, -1.0, 1.0);
            return;
          }
          t.mass = lam * (normal_pm(0, m, s, kappa, inf) +
                          normal_pm(0, m, s, -inf, -kappa));
          t.mass_up = lam * normal_pm(0, m, s, kappa, inf);
          t.mean = lam * (normal_pm(1, m, s, kappa, inf) +
                          normal_pm(1, m, s, -inf, -kappa));
          t.x2 = lam * (normal_pm(2, m, s, kappa, inf) +
                        normal_pm(2, m, s, -inf, -kappa));
          t.comp = lam * (normal_pm(1, m, s, kappa, 1.0) +
                          normal_pm(1, m, s, -1.0, -kappa));
        } else if constexpr (std::is_same_v<T, KouParams>) {
          const double inf = std::numeric_limits<double>::infinity();
          const double lam = j.lambda;
          if (lam == 0.0) return;
          const double cp = lam * j.p_up, cm = lam * (1.0 - j.p_up);
          t.mass = cp * exp_pm(0, j.eta_plus, kappa, inf) +
                   cm * exp_pm(0, j.eta_minus, kappa, inf);
          t.mass_up = cp * exp_pm(0, j.eta_plus, kappa, inf);
          t.mean = cp * exp_pm(1, j.eta_plus, kappa, inf) -
                   cm * exp_pm(1, j.eta_minus, kappa, inf);
          t.x2 = cp * exp_pm(2, j.eta_plus, kappa, inf) +
                 cm * exp_pm(2, j.eta_minus, kappa, inf);
          t.comp = cp * exp_pm(1, j.eta_plus, kappa, 1.0) -
                   cm * exp_pm(1, j.eta_minus, kappa, 1.0);
        }
      },
      jumps);
  return t;
}

double small_jump_variance_unclamped(const JumpMeasure& jumps, double kappa) {
  return std::visit(
      [&](const auto& j) -> double {
        using T = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<T, TemperedStableParams>) {
          return ts_partial(j.c_plus, j.alpha_plus, j.lambda_plus, 2, 0.0,
                            kappa) +
                 ts_partial(j.c_minus, j.alpha_minus, j.lambda_minus, 2, 0.0,
                            kappa);
        } else if constexpr (std::is_same_v<T, WatanabeParams>) {
          const int nmax = watanabe_nmax(j, kappa);
          const double r2 = 1.0 / (static_cast<double>(j.a) * j.a);
          return (j.c_plus + j.c_minus) * geom_tail_from(r2, nmax + 1);
        } else if constexpr (std::is_same_v<T, MertonParams>) {
          if (j.lambda == 0.0) return 0.0;
          return j.lambda * normal_pm(2, j.jump_mean, j.jump_std, -kappa, kappa);
        } else {
          if (j.lambda == 0.0) return 0.0;
          return j.lambda * (j.p_up * exp_pm(2, j.eta_plus, 0.0, kappa) +
                             (1.0 - j.p_up) * exp_pm(2, j.eta_minus, 0.0, kappa));
        }
      },
      jumps);
}

// The closed forms above can cancel to a small negative value when kappa is
// far below the scale of the measure; the variance is clamped at 0.
double small_jump_variance(const JumpMeasure& jumps, double kappa) {
  if (kappa == 0.0) return 0.0;
  return std::max(0.0, small_jump_variance_unclamped(jumps, kappa));
}

}  // namespace

const CutoffQuantities& LevyModel::cutoff(double kappa) const {
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    if (!(kappa == 0.0 && finite_activity()))
      throw std::invalid_argument(
          "cutoff: kappa must lie in (0,1], or be 0 for finite activity");
  }
  {
    std::shared_lock lk(cache_->mu);
    auto it = cache_->entries.find(kappa);
    if (it != cache_->entries.end()) return it->second;
  }
  CutoffQuantities q;
  q.kappa = kappa;
  const TailMoments tm = tail_moments(jumps_, kappa);
  q.nu_bar = tm.mass;
  q.nu_bar_up = tm.mass_up;
  q.b_kappa = b_ - tm.comp;
  q.sigma_bar_sq = small_jump_variance(jumps_, kappa);
  const double tot = q.sigma_bar_sq + sigma_ * sigma_;
  q.phi = tot > 0.0 ? std::sqrt(q.sigma_bar_sq / tot) : 0.0;
  std::unique_lock lk(cache_->mu);
  return cache_->entries.emplace(kappa, q).first->second;
}

std::pair<double, double> LevyModel::approx_moments(double kappa,
                                                    double t) const {
  const CutoffQuantities& q = cutoff(kappa);
  const TailMoments tm = tail_moments(jumps_, kappa);
  const double mean = q.b_kappa * t + t * tm.mean;
  const double var = t * (sigma_ * sigma_ + q.sigma_bar_sq + tm.x2);
  return {mean, var};
}

LevyModel LevyModel::reflect() const {
  JumpMeasure mirrored = std::visit(
      [](const auto& j) -> JumpMeasure {
        using T = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<T, TemperedStableParams>) {
          return TemperedStableParams{j.alpha_minus, j.alpha_plus, j.c_minus,
                                      j.c_plus, j.lambda_minus, j.lambda_plus};
        } else if constexpr (std::is_same_v<T, WatanabeParams>) {
          return WatanabeParams{j.a, j.c_minus, j.c_plus};
        } else if constexpr (std::is_same_v<T, MertonParams>) {
          return MertonParams{j.lambda, -j.jump_mean, j.jump_std};
        } else {
          return KouParams{j.lambda, 1.0 - j.p_up, j.eta_minus, j.eta_plus};
        }
      },
      jumps_);
  return LevyModel(sigma_, -b_, std::move(mirrored), reg_);
}

double LevyModel::i0q(double p) const {
  return std::visit(
      [&](const auto& j) -> double {
        using T = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<T, TemperedStableParams>) {
          return ts_partial(j.c_plus, j.alpha_plus, j.lambda_plus, p, 0.0, 1.0) +
                 ts_partial(j.c_minus, j.alpha_minus, j.lambda_minus, p, 0.0,
                            1.0);
        } else if constexpr (std::is_same_v<T, WatanabeParams>) {
          const double r = std::pow(static_cast<double>(j.a), -p);
          return (j.c_plus + j.c_minus) * geom_tail_from(r, 1);
        } else if constexpr (std::is_same_v<T, MertonParams>) {
          if (j.lambda == 0.0) return 0.0;
          const double m = j.jump_mean, s = j.jump_std;
          const auto f = [&](double x) {
            return std::pow(std::fabs(x), p) *
                   (norm_pdf((x - m) / s) / s + norm_pdf((-x - m) / s) / s);
          };
          return j.lambda * integrate(f, 0.0, 1.0, 1e-9);
        } else {
          if (j.lambda == 0.0) return 0.0;
          const auto f = [&](double x) {
            return std::pow(x, p) *
                   (j.p_up * j.eta_plus * std::exp(-j.eta_plus * x) +
                    (1.0 - j.p_up) * j.eta_minus * std::exp(-j.eta_minus * x));
          };
          return j.lambda * integrate(f, 0.0, 1.0, 1e-9);
        }
      },
      jumps_);
}

namespace {

// Standard normal conditioned on Z >= lo; Robert's shifted-exponential
// proposal when lo is deep in the tail.
double normal_tail(double lo, RngStream& rng) {
  if (lo < 0.2) {
    for (;;) {
      const double z = rng.normal01();
      if (z >= lo) return z;
    }
  }
  const double alpha = 0.5 * (lo + std::sqrt(lo * lo + 4.0));
  for (;;) {
    const double z = lo + rng.exponential() / alpha;
    const double d = z - alpha;
    if (rng.uniform01() <= std::exp(-0.5 * d * d)) return z;
  }
}

// Magnitude with density proportional to x^{-1-alpha} e^{-lambda x} on
// [kappa, inf). Pareto proposal while lambda*kappa < 1 (and alpha is not
// degenerate), shifted exponential otherwise; both keep the acceptance
// probability bounded away from zero on their regime.
double ts_tail_magnitude(double alpha, double lambda, double kappa,
                         RngStream& rng) {
  if (lambda * kappa < 1.0 && alpha > 1e-3) {
    const double inv_alpha = 1.0 / alpha;
    for (;;) {
      const double x = kappa * std::pow(rng.uniform01(), -inv_alpha);
      if (rng.uniform01() <= std::exp(-lambda * (x - kappa))) return x;
    }
  }
  const double e = 1.0 + alpha;
  for (;;) {
    const double x = kappa + rng.exponential() / lambda;
    if (rng.uniform01() <= std::pow(x / kappa, -e)) return x;
  }
}

}  // namespace

LevyModel::TailJumpSampler::TailJumpSampler(const LevyModel& model,
                                            double kappa)
    : jumps_(&model.jumps_), kappa_(kappa) {
  const CutoffQuantities& q = model.cutoff(kappa);
  if (!(q.nu_bar > 0.0))
    throw std::domain_error("sample_tail_jump: no tail mass at this kappa");
  p_up_ = q.nu_bar_up / q.nu_bar;
  if (const auto* w = std::get_if<WatanabeParams>(jumps_))
    watanabe_nmax_ = watanabe_nmax(*w, kappa);
}

double LevyModel::TailJumpSampler::operator()(RngStream& rng) const {
  const bool up = rng.uniform01() < p_up_;
  const double kappa = kappa_;
  return std::visit(
      [&](const auto& j) -> double {
        using T = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<T, TemperedStableParams>) {
          const double mag =
              up ? ts_tail_magnitude(j.alpha_plus, j.lambda_plus, kappa, rng)
                 : ts_tail_magnitude(j.alpha_minus, j.lambda_minus, kappa, rng);
          return up ? mag : -mag;
        } else if constexpr (std::is_same_v<T, WatanabeParams>) {
          const int n = 1 + static_cast<int>(rng.uniform01() * watanabe_nmax_);
          const double mag = std::pow(static_cast<double>(j.a),
                                      -std::min(n, watanabe_nmax_));
          return up ? mag : -mag;
        } else if constexpr (std::is_same_v<T, MertonParams>) {
          const double m = j.jump_mean, s = j.jump_std;
          if (kappa == 0.0) return rng.normal(m, s);
          // conditioned on the chosen side of the cutoff
          if (up) return m + s * normal_tail((kappa - m) / s, rng);
          return -(-m + s * normal_tail((kappa + m) / s, rng));
        } else {
          const double mag =
              kappa + rng.exponential() / (up ? j.eta_plus : j.eta_minus);
          return up ? mag : -mag;
        }
      },
      *jumps_);
}

double LevyModel::sample_tail_jump(double kappa, RngStream& rng) const {
  return TailJumpSampler(*this, kappa)(rng);
}

double LevyModel::tail_cdf(double kappa, double x) const {
  const CutoffQuantities& q = cutoff(kappa);
  if (!(q.nu_bar > 0.0)) throw std::domain_error("tail_cdf: no tail mass");
  const double lo = kappa > 0.0 ? kappa : 0.0;
  const double mass_down = q.nu_bar - tail_moments(jumps_, kappa).mass_up;
  double m = 0.0;
  if (x >= -lo) m = mass_down;
  std::visit(
      [&](const auto& j) {
        using T = std::decay_t<decltype(j)>;
        const double inf = std::numeric_limits<double>::infinity();
        if constexpr (std::is_same_v<T, TemperedStableParams>) {
          if (x < -lo) {
            m = ts_partial(j.c_minus, j.alpha_minus, j.lambda_minus, 0, -x, inf);
          } else if (x >= lo) {
            m += ts_partial(j.c_plus, j.alpha_plus, j.lambda_plus, 0, lo, x);
          }
        } else if constexpr (std::is_same_v<T, WatanabeParams>) {
          const int nmax = watanabe_nmax(j, kappa);
          double acc = 0.0;
          for (int n = nmax; n >= 1; --n) {  // largest negative atom first
            if (-std::pow(static_cast<double>(j.a), -n) <= x) acc += j.c_minus;
          }
          if (x < -lo) {
            m = acc;
          } else if (x >= lo) {
            for (int n = 1; n <= nmax; ++n)
              if (std::pow(static_cast<double>(j.a), -n) <= x) m += j.c_plus;
          }
        } else if constexpr (std::is_same_v<T, MertonParams>) {
          if (x < -lo) {
            m = j.lambda * normal_pm(0, j.jump_mean, j.jump_std, -inf, x);
          } else if (x >= lo) {
            m += j.lambda * normal_pm(0, j.jump_mean, j.jump_std, lo, x);
          }
        } else {
          const double cp = j.lambda * j.p_up, cm = j.lambda * (1.0 - j.p_up);
          if (x < -lo) {
            m = cm * exp_pm(0, j.eta_minus, -x, inf);
          } else if (x >= lo) {
            m += cp * exp_pm(0, j.eta_plus, lo, x);
          }
        }
      },
      jumps_);
  return std::min(1.0, m / q.nu_bar);
}

LevyModel pure_brownian(double sigma, double b) {
  RegularityProfile r;
  r.beta = 0.0;
  r.q = 0.5;
  if (sigma != 0.0) r.delta = 2.0;
  return LevyModel(sigma, b, MertonParams{0.0, 0.0, 0.1}, r);
}

}  // namespace sbg
