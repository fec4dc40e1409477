#include "sbg/estimators.hpp"

#include "sbg/sb_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace sbg {

namespace {

constexpr long long kBlockSize = 4096;  // fixed, so results are independent
                                        // of the worker count

double pairwise_sum(const double* v, long long n) {
  if (n <= 8) {
    double s = 0.0;
    for (long long i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const long long h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

struct BlockStats {
  long long count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  long long overflow = 0;
};

// Runs `draw(i)` for sample indices [first, first + n) across the requested
// workers. Blocks have a fixed size and are merged in index order, so the
// result is bit-identical for any worker count.
template <typename DrawFn>
SampleStats run_blocks(long long first, long long n, int workers,
                       DrawFn&& draw) {
  SampleStats out;
  if (n <= 0) return out;
  const auto t0 = std::chrono::steady_clock::now();
  const long long nblocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<BlockStats> blocks(static_cast<std::size_t>(nblocks));

  std::atomic<long long> next{0};
  const auto work = [&]() {
    std::vector<double> vals;
    std::vector<double> sqs;
    for (;;) {
      const long long b = next.fetch_add(1);
      if (b >= nblocks) break;
      const long long lo = first + b * kBlockSize;
      const long long hi = std::min(first + n, lo + kBlockSize);
      vals.clear();
      sqs.clear();
      BlockStats bs;
      for (long long i = lo; i < hi; ++i) {
        double v;
        if (!draw(i, v)) {
          ++bs.overflow;
          continue;
        }
        vals.push_back(v);
        sqs.push_back(v * v);
      }
      bs.count = static_cast<long long>(vals.size());
      bs.sum = pairwise_sum(vals.data(), bs.count);
      bs.sum_sq = pairwise_sum(sqs.data(), bs.count);
      blocks[static_cast<std::size_t>(b)] = bs;
    }
  };

  int nw = workers > 0 ? workers
                       : static_cast<int>(std::thread::hardware_concurrency());
  nw = static_cast<int>(std::max<long long>(1, std::min<long long>(nw, nblocks)));
  if (nw == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int i = 0; i < nw; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  for (const BlockStats& b : blocks) {  // merge in block-index order
    out.count += b.count;
    out.sum += b.sum;
    out.sum_sq += b.sum_sq;
    out.overflow += b.overflow;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  return out;
}

SampleStats merge(const SampleStats& a, const SampleStats& b) {
  SampleStats s = a;
  s.count += b.count;
  s.sum += b.sum;
  s.sum_sq += b.sum_sq;
  s.overflow += b.overflow;
  s.seconds += b.seconds;
  return s;
}

// Sampling front end that fixes the payoff orientation: supremum payoffs are
// fed the reflected model's infimum triplets, mirrored.
struct OrientedSampler {
  LevyModel sampling_model;
  bool mirror;

  OrientedSampler(const LevyModel& model, const Payoff& payoff)
      : sampling_model(payoff.orientation() == Orientation::Supremum
                           ? model.reflect()
                           : model),
        mirror(payoff.orientation() == Orientation::Supremum) {}

  ExtremumTriplet single(double kappa, int n, double horizon,
                         RngStream& rng) const {
    ExtremumTriplet t = sample_triplet(sampling_model, kappa, n, horizon, rng);
    return mirror ? to_supremum(t) : t;
  }

  CoupledPair coupled(double k1, double k2, int n, double horizon,
                      RngStream& rng) const {
    CoupledPair p = sbg_coupled_triplets(sampling_model, k1, k2, n, horizon, rng);
    if (mirror) {
      p.coarse = to_supremum(p.coarse);
      p.fine = to_supremum(p.fine);
    }
    return p;
  }
};

// Level keys: the RNG stream of sample i on level j is derive_stream(seed,
// j, i). Level 0 carries single-level draws, level j >= 1 coupled ones.
SampleStats run_single_level(const Payoff& payoff, const OrientedSampler& os,
                             double kappa, int n_sticks, long long first,
                             long long count, double horizon,
                             const EstimatorOptions& opts) {
  return run_blocks(first, count, opts.workers, [&](long long i, double& v) {
    RngStream rng = derive_stream(opts.seed, 0, static_cast<std::uint64_t>(i));
    const ExtremumTriplet t = os.single(kappa, n_sticks, horizon, rng);
    if (overflows(payoff, t)) return false;
    v = evaluate(payoff, t, horizon);
    return true;
  });
}

SampleStats run_diff_level(const Payoff& payoff, const OrientedSampler& os,
                           int level, double kappa_j, double kappa_next,
                           int n_sticks, long long first, long long count,
                           double horizon, const EstimatorOptions& opts) {
  return run_blocks(first, count, opts.workers, [&](long long i, double& v) {
    RngStream rng = derive_stream(opts.seed, static_cast<std::uint64_t>(level),
                                  static_cast<std::uint64_t>(i));
    const CoupledPair p =
        os.coupled(kappa_j, kappa_next, n_sticks, horizon, rng);
    if (overflows(payoff, p.fine) || overflows(payoff, p.coarse)) return false;
    v = evaluate(payoff, p.fine, horizon) - evaluate(payoff, p.coarse, horizon);
    return true;
  });
}

}  // namespace

double SampleStats::variance() const {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  return std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
}

int default_sticks(const LevyModel& model, double kappa, double horizon,
                   int n0) {
  const double lg = std::log1p(model.cutoff(kappa).nu_bar * horizon);
  return n0 + static_cast<int>(std::ceil(lg * lg));
}

McPlan mc_plan(const Payoff& payoff, const LevyModel& model, double horizon,
               double epsilon, const EstimatorOptions& opts) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("mc_plan: epsilon > 0");
  const double target = epsilon / std::sqrt(2.0);
  constexpr double kFloor = 1e-12;
  const auto bound = [&](double kappa) {
    return bias_bound(payoff.cls, model, kappa, horizon);
  };

  McPlan plan;
  if (bound(1.0) < target) {
    plan.kappa = 1.0;
  } else {
    // Scan a geometric grid for a bracket, then bisect on log kappa.
    constexpr int kGrid = 200;
    const double step = std::log(kFloor) / kGrid;
    double lo = 0.0, hi = 0.0;  // log kappa bracket: bound(hi) >= target
    bool found = false;
    for (int i = 1; i <= kGrid; ++i) {
      const double lk = step * i;
      if (bound(std::exp(lk)) < target) {
        lo = lk;
        hi = step * (i - 1);
        found = true;
        break;
      }
    }
    if (!found)
      throw InfeasibleAccuracyError(
          "mc_plan: bias bound stays above eps/sqrt(2) down to kappa = 1e-12");
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      (bound(std::exp(mid)) < target ? lo : hi) = mid;
    }
    plan.kappa = std::exp(lo);
  }

  plan.n_sticks = default_sticks(model, plan.kappa, horizon, opts.n0);
  const OrientedSampler os(model, payoff);
  plan.pilot = run_single_level(payoff, os, plan.kappa, plan.n_sticks, 0,
                                opts.pilot_size, horizon, opts);
  plan.pilot_variance = plan.pilot.variance();
  plan.n_samples = static_cast<long long>(
      std::ceil(2.0 * plan.pilot_variance / (epsilon * epsilon)));
  plan.n_samples = std::max<long long>(plan.n_samples, 2);
  return plan;
}

EstimateReport mc_estimate(const Payoff& payoff, const LevyModel& model,
                           double kappa, int n_sticks, long long n_samples,
                           double horizon, const EstimatorOptions& opts,
                           const SampleStats* warm_start) {
  if (n_samples < 2) throw std::invalid_argument("mc_estimate: N >= 2");
  if (n_sticks < 0) n_sticks = default_sticks(model, kappa, horizon, opts.n0);
  const OrientedSampler os(model, payoff);
  SampleStats stats;
  long long first = 0;
  if (warm_start) {
    stats = *warm_start;
    first = warm_start->count + warm_start->overflow;
  }
  if (first < n_samples) {
    stats = merge(stats, run_single_level(payoff, os, kappa, n_sticks, first,
                                          n_samples - first, horizon, opts));
  }
  EstimateReport rep;
  rep.seed = opts.seed;
  rep.estimate = stats.mean();
  rep.std_error = std::sqrt(stats.variance() / std::max<long long>(stats.count, 1));
  rep.total_cost_seconds = stats.seconds;
  rep.overflow_count = stats.overflow;
  rep.per_level.push_back({0, kappa, n_sticks, stats.count, stats.mean(),
                           stats.variance(), stats.seconds});
  return rep;
}

double optimal_rate(double a, double q) {
  if (a == 0.0) return 2.0 / q;
  const double aa = std::fabs(a);
  return (2.0 / aa) * std::log1p(aa / q);
}

double schedule_exponent(const PayoffClass& cls, const LevyModel& model) {
  const double q = model.regularity().q;
  const bool diffusive = model.sigma() != 0.0;
  const auto delta_eff = [&]() -> double {
    if (diffusive) return 2.0;
    if (!model.regularity().delta)
      throw std::invalid_argument(
          "schedule_exponent: class requires the Orey index delta");
    return *model.regularity().delta;
  };
  switch (cls.tag) {
    case PayoffClassTag::Lip:
    case PayoffClassTag::LocLip:
      return 2.0 * (q - 1.0);
    case PayoffClassTag::BT1:
      return 2.0 * (q * (1.0 + cls.gamma) - cls.gamma) / (2.0 + cls.gamma);
    case PayoffClassTag::LipTau: {
      const double d = delta_eff();
      const double mn = d < 2.0 ? std::min(0.5, 2.0 * d / (2.0 - d)) : 0.5;
      return q - (1.0 - 0.5 * q) * mn;
    }
    case PayoffClassTag::BT2: {
      const double d = delta_eff();
      const double mn = d < 2.0 ? std::min(0.25, d / (2.0 - d)) : 0.25;
      return q - (1.0 - 0.5 * q) * mn;
    }
  }
  return 0.0;
}

namespace {

int clamped_sticks(const LevyModel& model, int j, double kappa_j,
                   double kappa_next, double horizon, int n0) {
  const double nb = model.cutoff(kappa_next).nu_bar * horizon;
  const double lg = std::log1p(nb);
  int n = n0 + static_cast<int>(std::ceil(std::max<double>(j, lg * lg)));
  // Admissible band: max{j, log_{2/3}(sigma_bar^4)} <= n_j <= C nu_bar.
  const double sb_sq = model.cutoff(kappa_j).sigma_bar_sq;
  int lower = j;
  if (sb_sq > 0.0 && sb_sq < 1.0) {
    lower = std::max(
        lower, static_cast<int>(std::ceil(2.0 * std::log(sb_sq) /
                                          std::log(2.0 / 3.0))));
  }
  int upper = std::max(lower, static_cast<int>(std::ceil(10.0 * (1.0 + nb))));
  return std::clamp(n, lower, upper);
}

}  // namespace

LevelSchedule mlmc_schedule(const Payoff& payoff, const LevyModel& model,
                            double horizon, double epsilon,
                            const EstimatorOptions& opts) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("mlmc_schedule: eps > 0");
  LevelSchedule sch;
  sch.epsilon = epsilon;
  sch.q = model.regularity().q;
  sch.a = schedule_exponent(payoff.cls, model);
  sch.r = optimal_rate(sch.a, sch.q);

  // Levels 0..m telescope to the law at the finest cutoff kappa_{m+1}, so m
  // is the first k whose achieved cutoff e^{-rk} brings the bias bound under
  // eps/sqrt(2); k = 0 (plain MC at kappa_1 = 1) is admissible.
  const double target = epsilon / std::sqrt(2.0);
  constexpr int kMaxLevels = 400;
  int m = -1;
  for (int k = 0; k <= kMaxLevels; ++k) {
    const double fine = std::exp(-sch.r * k);  // kappa_{k+1}
    if (fine < 1e-12) break;
    if (bias_bound(payoff.cls, model, fine, horizon) < target) {
      m = k;
      break;
    }
  }
  if (m < 0)
    throw InfeasibleAccuracyError(
        "mlmc_schedule: bias bound does not reach eps/sqrt(2) above the "
        "kappa floor");
  sch.m = m;

  sch.kappas.resize(static_cast<std::size_t>(m) + 1);
  for (int j = 1; j <= m + 1; ++j)
    sch.kappas[static_cast<std::size_t>(j - 1)] = std::exp(-sch.r * (j - 1));

  sch.n_sticks.resize(static_cast<std::size_t>(m) + 1);
  sch.n_sticks[0] = default_sticks(model, 1.0, horizon, opts.n0);
  for (int j = 1; j <= m; ++j) {
    sch.n_sticks[static_cast<std::size_t>(j)] =
        clamped_sticks(model, j, sch.kappas[static_cast<std::size_t>(j - 1)],
                       sch.kappas[static_cast<std::size_t>(j)], horizon,
                       opts.n0);
  }

  // Pilot variances and level costs.
  const OrientedSampler os(model, payoff);
  sch.pilot.resize(static_cast<std::size_t>(m) + 1);
  sch.b_bound.resize(static_cast<std::size_t>(m) + 1);
  sch.v_bound.resize(static_cast<std::size_t>(m) + 1);
  sch.c_bound.resize(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    const std::size_t idx = static_cast<std::size_t>(j);
    SampleStats st;
    if (j == 0) {
      st = run_single_level(payoff, os, 1.0, sch.n_sticks[0], 0,
                            opts.pilot_size, horizon, opts);
    } else {
      st = run_diff_level(payoff, os, j, sch.kappas[idx - 1], sch.kappas[idx],
                          sch.n_sticks[idx], 0, opts.pilot_size, horizon, opts);
    }
    sch.pilot[idx] = st;
    sch.b_bound[idx] =
        bias_bound(payoff.cls, model, sch.kappas[idx], horizon);
    sch.v_bound[idx] = st.variance();
    if (opts.measured_cost) {
      sch.c_bound[idx] =
          st.count > 0 ? st.seconds / static_cast<double>(st.count) : 1.0;
    } else {
      const double kappa_next = j == 0 ? 1.0 : sch.kappas[idx];
      sch.c_bound[idx] = sch.n_sticks[idx] +
                         model.cutoff(kappa_next).nu_bar * horizon;
    }
    if (!(sch.c_bound[idx] > 0.0)) sch.c_bound[idx] = 1.0;
  }

  // N_k = ceil(2 eps^-2 sqrt(V(k)/C(k)) sum_j sqrt(C(j) V(j))), then a
  // deterministic fix-up so sum_k V(k)/N_k <= eps^2/2 holds on the computed
  // integers despite rounding.
  double s = 0.0;
  for (int j = 0; j <= m; ++j)
    s += std::sqrt(sch.c_bound[static_cast<std::size_t>(j)] *
                   sch.v_bound[static_cast<std::size_t>(j)]);
  sch.n_samples.resize(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    const std::size_t idx = static_cast<std::size_t>(j);
    double nk = 0.0;
    if (sch.v_bound[idx] > 0.0 && s > 0.0) {
      // m = 0 degenerates to the plain-MC count 2 V / eps^2 (bit-exactly, so
      // the single-level estimator coincides with mc_estimate).
      nk = m == 0 ? std::ceil(2.0 * sch.v_bound[idx] / (epsilon * epsilon))
                  : std::ceil(2.0 / (epsilon * epsilon) *
                              std::sqrt(sch.v_bound[idx] / sch.c_bound[idx]) *
                              s);
    }
    sch.n_samples[idx] =
        std::max<long long>(static_cast<long long>(nk), 2);
  }
  const auto var_sum = [&]() {
    double acc = 0.0;
    for (int j = 0; j <= m; ++j) {
      const std::size_t idx = static_cast<std::size_t>(j);
      acc += sch.v_bound[idx] / static_cast<double>(sch.n_samples[idx]);
    }
    return acc;
  };
  while (var_sum() > 0.5 * epsilon * epsilon) {
    // bump the level with the largest V/N contribution
    int arg = 0;
    double best = -1.0;
    for (int j = 0; j <= m; ++j) {
      const std::size_t idx = static_cast<std::size_t>(j);
      const double c = sch.v_bound[idx] / static_cast<double>(sch.n_samples[idx]);
      if (c > best) {
        best = c;
        arg = j;
      }
    }
    sch.n_samples[static_cast<std::size_t>(arg)] +=
        std::max<long long>(sch.n_samples[static_cast<std::size_t>(arg)] / 8, 1);
  }
  return sch;
}

EstimateReport mlmc_estimate(const Payoff& payoff, const LevyModel& model,
                             const LevelSchedule& schedule, double horizon,
                             const EstimatorOptions& opts) {
  const OrientedSampler os(model, payoff);
  EstimateReport rep;
  rep.seed = opts.seed;
  double est = 0.0, var_of_mean = 0.0, cost = 0.0;
  for (int j = 0; j <= schedule.m; ++j) {
    const std::size_t idx = static_cast<std::size_t>(j);
    const long long n = schedule.n_samples[idx];
    SampleStats st;
    long long first = 0;
    if (idx < schedule.pilot.size()) {
      st = schedule.pilot[idx];
      first = st.count + st.overflow;
    }
    if (first < n) {
      SampleStats more;
      if (j == 0) {
        more = run_single_level(payoff, os, schedule.kappas[0],
                                schedule.n_sticks[0], first, n - first,
                                horizon, opts);
      } else {
        more = run_diff_level(payoff, os, j, schedule.kappas[idx - 1],
                              schedule.kappas[idx], schedule.n_sticks[idx],
                              first, n - first, horizon, opts);
      }
      st = merge(st, more);
    }
    est += st.mean();
    var_of_mean += st.variance() / std::max<long long>(st.count, 1);
    cost += st.seconds;
    rep.overflow_count += st.overflow;
    rep.per_level.push_back({j,
                             j == 0 ? schedule.kappas[0] : schedule.kappas[idx],
                             schedule.n_sticks[idx], st.count, st.mean(),
                             st.variance(), st.seconds});
  }
  rep.estimate = est;
  rep.std_error = std::sqrt(var_of_mean);
  rep.total_cost_seconds = cost;
  return rep;
}

LevelReport level_stats(const Payoff& payoff, const LevyModel& model, int level,
                        double kappa_j, double kappa_next, int n_j,
                        long long n_samples, double horizon,
                        const EstimatorOptions& opts) {
  if (n_samples < 2) throw std::invalid_argument("level_stats: N >= 2");
  const OrientedSampler os(model, payoff);
  const SampleStats st = run_diff_level(payoff, os, level, kappa_j, kappa_next,
                                        n_j, 0, n_samples, horizon, opts);
  return {level,   kappa_next,    n_j, st.count,
          st.mean(), st.variance(), st.seconds};
}

}  // namespace sbg
