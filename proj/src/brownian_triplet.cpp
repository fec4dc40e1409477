#include "sbg/brownian_triplet.hpp"

#include <cmath>
#include <stdexcept>

namespace sbg {

namespace {

// Michael-Schucany-Haas inverse Gaussian IG(mean, shape).
double inverse_gaussian(double mean, double shape, RngStream& rng) {
  const double n = rng.normal01();
  const double y = n * n;
  const double x = mean + 0.5 * mean * mean * y / shape -
                   0.5 * (mean / shape) *
                       std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
  if (rng.uniform01() <= mean / (mean + x)) return x;
  return mean * mean / x;
}

// Standard normal conditioned on Z >= lo (lo >= 0 here).
double normal_tail_lo(double lo, RngStream& rng) {
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

// First-passage kernel p_C(s) = s^{-3/2} e^{-C/(2s)}, i.e. the density shape
// of the hitting time C / Z^2 with Z standard normal.
double fp_kernel(double s, double c) {
  if (s <= 0.0) return 0.0;
  return std::pow(s, -1.5) * std::exp(-0.5 * c / s);
}

// Exact draw from p_C restricted to (0,t): C/Z^2 < t iff |Z| > sqrt(C/t),
// so condition the normal on its tail instead of looping on the raw draw.
double fp_conditioned(double c, double t, RngStream& rng) {
  const double z = normal_tail_lo(std::sqrt(c / t), rng);
  return c / (z * z);
}

// Exact mixture sampler for the argmin law; used as the fallback when the
// rejection loop below hits its iteration cap on extreme (A, B) inputs.
// With s = t/(1+w) the target becomes (1+w) w^{-3/2} e^{-alpha w - beta/w},
// a GIG(-1/2)/GIG(1/2) mixture with weights a : b, both inverse Gaussian.
double argmin_time_mixture(double t, double a, double b, double alpha,
                           double beta, RngStream& rng) {
  double w;
  if (rng.uniform01() * (a + b) < b) {
    w = 1.0 / inverse_gaussian(std::sqrt(alpha / beta), 2.0 * alpha, rng);
  } else {
    w = inverse_gaussian(std::sqrt(beta / alpha), 2.0 * beta, rng);
  }
  return t / (1.0 + w);
}

// Argmin location given t, v, depth a = -inf >= 0 and rise b = terminal - inf
// >= 0. Density over s in (0,t):
//   f(s) ~ p_A(s) p_B(t-s),  A = a^2/v^2,  B = b^2/v^2.
// Rejection with a two-sided first-passage (inverse-Gaussian-shaped)
// proposal: propose the time from the side with the smaller parameter,
// conditioned to (0,t), and accept against the opposite kernel normalized by
// its supremum on (0,t).
double argmin_time(double t, double v, double a, double b, RngStream& rng) {
  if (a <= 0.0) return 0.0;  // path minimum at the start
  if (b <= 0.0) return t;    // terminal value is the minimum
  const double big_a = a * a / (v * v);
  const double big_b = b * b / (v * v);
  const bool from_a = big_a <= big_b;
  const double prop_c = from_a ? big_a : big_b;
  const double other_c = from_a ? big_b : big_a;
  const double sup_other = fp_kernel(std::min(other_c / 3.0, t), other_c);
  for (int it = 0; it < 64; ++it) {
    const double s_prop = fp_conditioned(prop_c, t, rng);
    if (rng.uniform01() * sup_other <= fp_kernel(t - s_prop, other_c)) {
      return from_a ? s_prop : t - s_prop;
    }
  }
  return argmin_time_mixture(t, a, b, big_a / (2.0 * t), big_b / (2.0 * t),
                             rng);
}

}  // namespace

ExtremumTriplet sample_bm_min_triplet(double t, double v, double mu,
                                      RngStream& rng) {
  if (!(t > 0.0) || !(v > 0.0))
    throw std::invalid_argument("sample_bm_min_triplet: need t > 0 and v > 0");
  const double sd = v * std::sqrt(t);
  const double terminal = mu * t + sd * rng.normal01();
  // P(inf <= m | terminal) = exp(-2 m (m - terminal) / (v^2 t)); solve for the
  // root with m <= min(0, terminal).
  const double lu = std::log(rng.uniform01());
  const double inf =
      0.5 * (terminal - std::sqrt(terminal * terminal - 2.0 * v * v * t * lu));
  const double tau = argmin_time(t, v, -inf, terminal - inf, rng);
  return {terminal, inf, tau, Orientation::Infimum};
}

double bm_inf_cdf(double t, double v, double mu, double x) {
  if (x >= 0.0) return 1.0;
  const double sd = v * std::sqrt(t);
  const auto phi = [](double z) { return 0.5 * std::erfc(-z / 1.4142135623730950488); };
  return phi((x - mu * t) / sd) +
         std::exp(2.0 * mu * x / (v * v)) * phi((x + mu * t) / sd);
}

}  // namespace sbg
