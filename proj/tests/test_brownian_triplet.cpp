#include "sbg/brownian_triplet.hpp"
#include "sbg/statistics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace sbg;

namespace {

std::vector<ExtremumTriplet> draw(double t, double v, double mu, int n,
                                  unsigned seed) {
  RngStream rng(seed);
  std::vector<ExtremumTriplet> out(static_cast<std::size_t>(n));
  for (auto& e : out) e = sample_bm_min_triplet(t, v, mu, rng);
  return out;
}

}  // namespace

TEST_CASE("triplet path invariants hold on every draw") {
  for (const auto& [t, v, mu] : {std::tuple{1.0, 1.0, 0.0},
                                 std::tuple{1.0, 0.5, -0.3},
                                 std::tuple{0.01, 2.0, 5.0}}) {
    for (const ExtremumTriplet& e : draw(t, v, mu, 20000, 11)) {
      CHECK(e.extremum <= std::min(0.0, e.terminal) + 1e-15);
      CHECK(e.tau >= 0.0);
      CHECK(e.tau <= t);
      CHECK(e.orientation == Orientation::Infimum);
    }
  }
}

TEST_CASE("terminal marginal is Normal(mu t, v^2 t)") {
  const double t = 2.0, v = 1.3, mu = 0.7;
  const auto trips = draw(t, v, mu, 100000, 23);
  std::vector<double> x(trips.size());
  for (std::size_t i = 0; i < trips.size(); ++i) x[i] = trips[i].terminal;
  const Summary s = summarize(x);
  CHECK(std::fabs(s.mean - mu * t) < 4.0 * s.std_error);
  // SE of the sample variance for a normal: var * sqrt(2/(n-1))
  const double var_se = s.variance * std::sqrt(2.0 / (s.count - 1.0));
  CHECK(std::fabs(s.variance - v * v * t) < 4.0 * var_se);
  const double sd = v * std::sqrt(t);
  CHECK(ks_test(x, [&](double y) { return normal_cdf((y - mu * t) / sd); }) >
        0.001);
}

TEST_CASE("infimum follows the reflection-principle law") {
  SUBCASE("P(inf <= -1) = 2 Phi(-1) for the standard case") {
    const auto trips = draw(1.0, 1.0, 0.0, 100000, 31);
    long long hits = 0;
    for (const auto& e : trips)
      if (e.extremum <= -1.0) ++hits;
    const double p_hat = static_cast<double>(hits) / trips.size();
    const double p = 2.0 * normal_cdf(-1.0);  // 0.31731...
    CHECK(std::fabs(p_hat - p) <
          4.0 * std::sqrt(p * (1 - p) / trips.size()));
  }
  SUBCASE("KS against the closed-form CDF, with and without drift") {
    for (const auto& [t, v, mu] :
         {std::tuple{1.0, 1.0, 0.0}, std::tuple{1.0, 0.5, -0.3}}) {
      const auto trips = draw(t, v, mu, 100000, 41);
      std::vector<double> m(trips.size());
      for (std::size_t i = 0; i < trips.size(); ++i) m[i] = trips[i].extremum;
      const double tt = t, vv = v, mm = mu;
      CHECK(ks_test(m, [&](double x) { return bm_inf_cdf(tt, vv, mm, x); }) >
            0.001);
    }
  }
}

TEST_CASE("driftless argmin follows the arcsine law") {
  const auto trips = draw(1.0, 1.0, 0.0, 100000, 53);
  long long early = 0;
  std::vector<double> taus(trips.size());
  for (std::size_t i = 0; i < trips.size(); ++i) {
    taus[i] = trips[i].tau;
    if (trips[i].tau <= 0.5) ++early;
  }
  const double p_hat = static_cast<double>(early) / trips.size();
  CHECK(std::fabs(p_hat - 0.5) < 4.0 * std::sqrt(0.25 / trips.size()));
  CHECK(ks_test(taus, [](double x) { return oracle::arcsine_cdf(x, 1.0); }) >
        0.001);
}

TEST_CASE("invalid arguments are rejected") {
  RngStream rng(1);
  CHECK_THROWS_AS(sample_bm_min_triplet(0.0, 1.0, 0.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_bm_min_triplet(1.0, 0.0, 0.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_bm_min_triplet(-1.0, 1.0, 0.0, rng),
                  std::invalid_argument);
}
