#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sbg {

double normal_cdf(double x);

/// Asymptotic Kolmogorov distribution tail Q(lambda) = P(K > lambda); the
/// p-value of a KS statistic d on n samples is Q(d (sqrt(n)+0.12+0.11/sqrt(n))).
double kolmogorov_tail(double lambda);

/// One-sample Kolmogorov-Smirnov p-value of `samples` against the CDF `cdf`.
/// Sorts a copy of the input.
double ks_test(std::span<const double> samples,
               const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov p-value.
double ks_test_two_sample(std::span<const double> a, std::span<const double> b);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least-squares fit y ~ intercept + slope x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Weighted least squares with per-point weights (typically inverse
/// variances).
LineFit fit_line_weighted(std::span<const double> x, std::span<const double> y,
                          std::span<const double> w);

struct Summary {
  long long count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;  // of the mean
};

Summary summarize(std::span<const double> v);

}  // namespace sbg
