#pragma once

#include "sbg/error_bounds.hpp"
#include "sbg/levy_models.hpp"
#include "sbg/payoffs.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbg {

/// Requested accuracy cannot be met: the class bias bound stays above
/// eps/sqrt(2) down to the kappa floor.
struct InfeasibleAccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimatorOptions {
  std::uint64_t seed = 1;
  int workers = 1;          // 0 = hardware concurrency
  int pilot_size = 1000;    // pilot draws per level
  bool measured_cost = false;  // use pilot wall-clock for C(j) instead of
                               // the analytic n_j + nu_bar(kappa_{j+1}) T
  int n0 = 5;               // base stick count in the n(kappa) rule
};

/// Accumulated sample statistics; mergeable, carried from pilot phases into
/// the final averages so pilot draws are never wasted.
struct SampleStats {
  long long count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  long long overflow = 0;
  double seconds = 0.0;

  double mean() const { return count > 0 ? sum / count : 0.0; }
  double variance() const;
};

struct LevelReport {
  int level = 0;
  double kappa = 1.0;       // finest cutoff used on this level
  int n_sticks = 0;
  long long n_samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  double cost_seconds = 0.0;
};

struct EstimateReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::vector<LevelReport> per_level;
  double total_cost_seconds = 0.0;
  std::uint64_t seed = 0;
  long long overflow_count = 0;
};

/// Rule-of-thumb stick count n(kappa) = n0 + ceil(log^2(1 + nu_bar(kappa) T)).
int default_sticks(const LevyModel& model, double kappa, double horizon,
                   int n0 = 5);

struct McPlan {
  double kappa = 1.0;
  long long n_samples = 0;
  double pilot_variance = 0.0;
  int n_sticks = 0;
  SampleStats pilot;  // re-used by mc_estimate when the keys match
};

/// Cutoff by bisection of the class bias bound below eps/sqrt(2); sample
/// count N = ceil(2 V / eps^2) with V from a pilot run.
McPlan mc_plan(const Payoff& payoff, const LevyModel& model, double horizon,
               double epsilon, const EstimatorOptions& opts = {});

/// Plain MC over n_samples independent triplet draws. n_sticks < 0 selects
/// the default rule.
EstimateReport mc_estimate(const Payoff& payoff, const LevyModel& model,
                           double kappa, int n_sticks, long long n_samples,
                           double horizon, const EstimatorOptions& opts = {},
                           const SampleStats* warm_start = nullptr);

struct LevelSchedule {
  double r = 0.0;        // geometric rate: kappa_j = e^{-r(j-1)}
  double a = 0.0;        // schedule exponent of the payoff class
  double q = 0.0;        // moment exponent used
  int m = 0;             // top level; the estimator runs levels 0..m
  double epsilon = 0.0;
  std::vector<double> kappas;          // kappa_1 .. kappa_{m+1}
  std::vector<int> n_sticks;           // per level 0..m
  std::vector<long long> n_samples;    // per level 0..m
  std::vector<double> b_bound;         // bias bound B(k) at the level cutoff
  std::vector<double> v_bound;         // pilot V(k)
  std::vector<double> c_bound;         // C(k)
  std::vector<SampleStats> pilot;      // per level, re-used by mlmc_estimate
};

/// Optimal geometric rate r of the MLMC schedule for exponent a and moment
/// exponent q.
double optimal_rate(double a, double q);

/// Schedule exponent a for a payoff class under the model's regularity.
double schedule_exponent(const PayoffClass& cls, const LevyModel& model);

/// Full MLMC plan: rate, level count from the bias bound, stick counts, and
/// per-level sample sizes from pilot variances and the cost model.
LevelSchedule mlmc_schedule(const Payoff& payoff, const LevyModel& model,
                            double horizon, double epsilon,
                            const EstimatorOptions& opts = {});

/// MLMC estimator: level 0 draws at kappa_1 = 1, level j >= 1 couples
/// (kappa_j, kappa_{j+1}) with n_j sticks.
EstimateReport mlmc_estimate(const Payoff& payoff, const LevyModel& model,
                             const LevelSchedule& schedule, double horizon,
                             const EstimatorOptions& opts = {});

/// Mean, variance and wall-clock cost of n_samples draws of the level-j
/// difference D_j for the coupling (kappa_j, kappa_next, n_j).
LevelReport level_stats(const Payoff& payoff, const LevyModel& model, int level,
                        double kappa_j, double kappa_next, int n_j,
                        long long n_samples, double horizon,
                        const EstimatorOptions& opts = {});

}  // namespace sbg
