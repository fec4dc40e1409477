#include "sbg/config.hpp"
#include "sbg/error_bounds.hpp"
#include "sbg/estimators.hpp"
#include "sbg/report.hpp"
#include "sbg/sb_engine.hpp"
#include "sbg/statistics.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitValidation = 4;

struct CommonFlags {
  std::string config_path;
  std::string mode;
  double eps = -1.0;
  long long seed = -1;
  int workers = -1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags* flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags->config_path,
                              "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--mode", flags->mode, "mc | mlmc (overrides config)");
  cmd->add_option("--eps", flags->eps, "target accuracy (overrides config)");
  cmd->add_option("--seed", flags->seed, "root seed (overrides config)");
  cmd->add_option("--workers", flags->workers,
                  "worker threads, 0 = all cores (overrides config)");
  cmd->add_option("--out", flags->out, "output directory (overrides config)");
}

sbg::ExperimentConfig resolve(const CommonFlags& flags) {
  sbg::ExperimentConfig cfg = sbg::load_config(flags.config_path);
  if (!flags.mode.empty()) {
    if (flags.mode != "mc" && flags.mode != "mlmc")
      throw sbg::ConfigError("--mode must be \"mc\" or \"mlmc\"");
    cfg.mode = flags.mode;
  }
  if (flags.eps > 0.0) cfg.epsilon = flags.eps;
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.workers >= 0) cfg.workers = flags.workers;
  if (!flags.out.empty()) cfg.out_dir = flags.out;
  return cfg;
}

sbg::EstimatorOptions options_of(const sbg::ExperimentConfig& cfg) {
  sbg::EstimatorOptions opts;
  opts.seed = cfg.seed;
  opts.workers = cfg.workers;
  opts.pilot_size = cfg.pilot;
  opts.measured_cost = cfg.measured_cost;
  return opts;
}

const sbg::Payoff& require_payoff(const sbg::ExperimentConfig& cfg) {
  if (!cfg.payoff)
    throw sbg::ConfigError("config: missing required key \"payoff\"");
  return *cfg.payoff;
}

int cmd_estimate(const CommonFlags& flags) {
  const sbg::ExperimentConfig cfg = resolve(flags);
  const sbg::Payoff& payoff = require_payoff(cfg);
  const sbg::EstimatorOptions opts = options_of(cfg);

  sbg::EstimateReport rep;
  if (cfg.mode == "mc") {
    double kappa = cfg.kappa_override;
    long long n = cfg.n_override;
    int sticks = cfg.sticks_override;
    const sbg::SampleStats* warm = nullptr;
    sbg::McPlan plan;
    if (kappa < 0.0 || n < 0) {
      plan = sbg::mc_plan(payoff, *cfg.model, cfg.horizon, cfg.epsilon, opts);
      if (kappa < 0.0) {
        kappa = plan.kappa;
        sticks = plan.n_sticks;
        warm = &plan.pilot;  // pilot streams match, re-use the draws
      }
      if (n < 0) n = plan.n_samples;
    }
    rep = sbg::mc_estimate(payoff, *cfg.model, kappa, sticks, n, cfg.horizon,
                           opts, warm);
  } else {
    const sbg::LevelSchedule sch =
        sbg::mlmc_schedule(payoff, *cfg.model, cfg.horizon, cfg.epsilon, opts);
    rep = sbg::mlmc_estimate(payoff, *cfg.model, sch, cfg.horizon, opts);
  }

  std::filesystem::create_directories(cfg.out_dir);
  const auto doc = sbg::report_to_json(rep, payoff.kind, cfg.mode, cfg.epsilon);
  sbg::write_file(cfg.out_dir + "/report.json", doc.dump(2) + "\n");
  sbg::write_file(cfg.out_dir + "/levels.csv", sbg::levels_csv(rep));
  std::cout << "estimate " << sbg::fmt_double(rep.estimate) << " +- "
            << sbg::fmt_double(rep.std_error) << " ("
            << cfg.out_dir + "/report.json" << ")\n";
  return kExitOk;
}

int cmd_scan(const CommonFlags& flags) {
  const sbg::ExperimentConfig cfg = resolve(flags);
  const sbg::Payoff& payoff = require_payoff(cfg);
  if (!cfg.scan) throw sbg::ConfigError("config: missing required key \"scan\"");
  const sbg::ScanConfig& sc = *cfg.scan;
  const sbg::EstimatorOptions opts = options_of(cfg);

  std::string csv =
      "j,log_kappa,log_abs_mean_Dj,log_var_Dj,"
      "theory_bias_slope_line,theory_var_slope_line\n";
  double anchor_bias = 0.0, anchor_var = 0.0;
  bool anchored = false;
  for (int j = sc.j_min; j <= sc.j_max; ++j) {
    const double kj = std::exp(-sc.r * (j - 1));
    const double kn = std::exp(-sc.r * j);
    const int nj = sbg::default_sticks(*cfg.model, kn, cfg.horizon);
    const sbg::LevelReport lr = sbg::level_stats(
        payoff, *cfg.model, j, kj, kn, nj, sc.n_samples, cfg.horizon, opts);
    const sbg::LevelBounds lb = sbg::level_bounds(
        payoff.cls, *cfg.model, j, {kj, kn, nj, cfg.horizon});
    const double lmean = std::log(std::fabs(lr.mean));
    const double lvar = std::log(lr.variance);
    if (!anchored) {
      anchor_bias = lmean - std::log(lb.bias);
      anchor_var = lvar - std::log(lb.variance);
      anchored = true;
    }
    csv += std::to_string(j) + ',' + sbg::fmt_double(std::log(kj)) + ',' +
           sbg::fmt_double(lmean) + ',' + sbg::fmt_double(lvar) + ',' +
           sbg::fmt_double(std::log(lb.bias) + anchor_bias) + ',' +
           sbg::fmt_double(std::log(lb.variance) + anchor_var) + '\n';
    std::cout << "scan j=" << j << " log_kappa=" << std::log(kj)
              << " mean=" << lr.mean << " var=" << lr.variance << "\n";
  }
  std::filesystem::create_directories(cfg.out_dir);
  sbg::write_file(cfg.out_dir + "/scan.csv", csv);
  return kExitOk;
}

int cmd_speedup(const CommonFlags& flags) {
  const sbg::ExperimentConfig cfg = resolve(flags);
  if (!cfg.speedup)
    throw sbg::ConfigError("config: missing required key \"speedup\"");
  const sbg::SpeedupConfig& sp = *cfg.speedup;

  const auto time_draws = [&](const sbg::LevyModel& model, double kappa, int n,
                              bool use_sbg) {
    const auto t0 = std::chrono::steady_clock::now();
    double sink = 0.0;
    for (long long i = 0; i < sp.n_samples; ++i) {
      sbg::RngStream rng =
          sbg::derive_stream(cfg.seed, use_sbg ? 1 : 2, static_cast<std::uint64_t>(i));
      const sbg::ExtremumTriplet t =
          use_sbg ? sbg::sample_triplet(model, kappa, n, cfg.horizon, rng)
                  : sbg::coupled_jd_triplets(model, kappa, kappa, cfg.horizon,
                                             rng)
                        .fine;
      sink += t.terminal + t.extremum + t.tau;
    }
    volatile double keep = sink;
    (void)keep;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  std::string csv = "sweep,value,n,alg2_seconds,sbg_seconds,ratio\n";
  const bool jd_sweep = !sp.lambdas.empty();
  const std::vector<double>& values = jd_sweep ? sp.lambdas : sp.kappas;
  for (const double v : values) {
    sbg::LevyModel model = *cfg.model;
    double kappa = v;
    if (jd_sweep) {
      if (!model.finite_activity())
        throw sbg::ConfigError(
            "speedup: \"lambdas\" sweep needs a merton or kou model");
      sbg::JumpMeasure jm = model.jumps();
      if (auto* mp = std::get_if<sbg::MertonParams>(&jm)) mp->lambda = v;
      if (auto* kp = std::get_if<sbg::KouParams>(&jm)) kp->lambda = v;
      model = sbg::LevyModel(model.sigma(), model.drift(), jm,
                             model.regularity());
      kappa = 0.0;
    }
    for (const int n : sp.sticks) {
      const double t_alg2 = time_draws(model, kappa, n, false);
      const double t_sbg = time_draws(model, kappa, n, true);
      const double ratio = t_sbg > 0.0 ? t_alg2 / t_sbg : 0.0;
      csv += (jd_sweep ? std::string("lambda") : std::string("kappa")) + ',' +
             sbg::fmt_double(v) + ',' + std::to_string(n) + ',' +
             sbg::fmt_double(t_alg2) + ',' + sbg::fmt_double(t_sbg) + ',' +
             sbg::fmt_double(ratio) + '\n';
      std::cout << (jd_sweep ? "lambda=" : "kappa=") << v << " n=" << n
                << " ratio=" << ratio << "\n";
    }
  }
  std::filesystem::create_directories(cfg.out_dir);
  sbg::write_file(cfg.out_dir + "/speedup.csv", csv);
  return kExitOk;
}

// Fast statistical invariant suite; exit 4 on any failure.
int cmd_validate(std::uint64_t seed, int workers) {
  using namespace sbg;
  int failures = 0;
  const auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  {  // stick-breaking remainder mean: E[L_5] = 2^-5
    const int n = 200000;
    std::vector<double> rem(n);
    for (int i = 0; i < n; ++i) {
      RngStream rng = derive_stream(seed, 10, static_cast<std::uint64_t>(i));
      rem[static_cast<std::size_t>(i)] = stick_breaking(1.0, 5, rng).remainder;
    }
    const Summary s = summarize(rem);
    check("stick_breaking_remainder_mean",
          std::fabs(s.mean - std::exp2(-5)) < 4.0 * s.std_error);
  }

  {  // Brownian triplet contracts at (t,v,mu) = (1,1,0)
    const int n = 30000;
    std::vector<double> terminal(n), infimum(n);
    int tau_le_half = 0;
    for (int i = 0; i < n; ++i) {
      RngStream rng = derive_stream(seed, 11, static_cast<std::uint64_t>(i));
      const ExtremumTriplet t = sample_bm_min_triplet(1.0, 1.0, 0.0, rng);
      terminal[static_cast<std::size_t>(i)] = t.terminal;
      infimum[static_cast<std::size_t>(i)] = t.extremum;
      if (t.tau <= 0.5) ++tau_le_half;
    }
    check("phi_terminal_ks",
          ks_test(terminal, [](double x) { return normal_cdf(x); }) > 0.001);
    check("phi_infimum_ks",
          ks_test(infimum, [](double x) { return bm_inf_cdf(1.0, 1.0, 0.0, x); }) >
              0.001);
    const double p = static_cast<double>(tau_le_half) / n;
    check("phi_argmin_median",
          std::fabs(p - 0.5) < 4.0 * std::sqrt(0.25 / n));
  }

  {  // SBG on a pure Brownian model: E[sup] = sqrt(2/pi)
    const LevyModel bm = pure_brownian(1.0, 0.0);
    const LevyModel refl = bm.reflect();
    const int n = 30000;
    std::vector<double> sup(n);
    for (int i = 0; i < n; ++i) {
      RngStream rng = derive_stream(seed, 12, static_cast<std::uint64_t>(i));
      sup[static_cast<std::size_t>(i)] =
          to_supremum(sample_triplet(refl, 1.0, 5, 1.0, rng)).extremum;
    }
    const Summary s = summarize(sup);
    check("pure_bm_mean_sup",
          std::fabs(s.mean - std::sqrt(2.0 / 3.14159265358979323846)) <
              4.0 * s.std_error);
  }

  {  // marginal-law equality: Algorithm 1 terminal vs SBG terminal
    const LevyModel ts(0.0, 0.0,
                       TemperedStableParams{0.66, 0.66, 0.1305, 0.0615, 6.5022,
                                            3.0888});
    const double kappa = 0.05, t = 1.0 / 6.0;
    const int n = 30000;
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      RngStream r1 = derive_stream(seed, 13, static_cast<std::uint64_t>(i));
      RngStream r2 = derive_stream(seed, 14, static_cast<std::uint64_t>(i));
      a[static_cast<std::size_t>(i)] =
          coupled_increments(ts, 1.0, kappa, t, r1).second;
      b[static_cast<std::size_t>(i)] =
          sample_triplet(ts, kappa, 10, t, r2).terminal;
    }
    check("marginal_law_alg1_vs_sbg", ks_test_two_sample(a, b) > 0.001);
  }

  {  // determinism of the estimator layer
    const LevyModel bm = pure_brownian(1.0, -0.5);
    EstimatorOptions opts;
    opts.seed = seed;
    opts.workers = workers;  // 0 = all cores
    const Payoff lb = Payoff::lookback_put(1.0);
    const EstimateReport r1 = mc_estimate(lb, bm, 1.0, 5, 20000, 1.0, opts);
    opts.workers = 1;
    const EstimateReport r2 = mc_estimate(lb, bm, 1.0, 5, 20000, 1.0, opts);
    check("estimator_determinism_across_workers",
          r1.estimate == r2.estimate && r1.std_error == r2.std_error);
  }

  return failures == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stick-breaking Gaussian samplers and MC/MLMC estimators for "
               "extrema of Levy processes"};
  app.require_subcommand(1);

  CommonFlags est_flags, scan_flags, speed_flags;
  auto* est = app.add_subcommand("estimate", "run an MC or MLMC estimation");
  add_common(est, &est_flags, true);
  auto* scan = app.add_subcommand(
      "scan", "bias/variance decay scan over a geometric cutoff grid");
  add_common(scan, &scan_flags, true);
  auto* speed = app.add_subcommand(
      "speedup", "wall-clock ratio of the jump-diffusion sampler vs SBG");
  add_common(speed, &speed_flags, true);

  std::uint64_t val_seed = 1;
  int val_workers = 0;
  auto* val =
      app.add_subcommand("validate", "run the statistical invariant suite");
  val->add_option("--seed", val_seed, "root seed");
  val->add_option("--workers", val_workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) return cmd_estimate(est_flags);
    if (scan->parsed()) return cmd_scan(scan_flags);
    if (speed->parsed()) return cmd_speedup(speed_flags);
    if (val->parsed()) return cmd_validate(val_seed, val_workers);
  } catch (const sbg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sbg::InfeasibleAccuracyError& e) {
    std::cerr << "infeasible accuracy: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
