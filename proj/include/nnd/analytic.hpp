#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace nnd {

struct AnalyticConstants {
  double beta = 0.7124;        // l_opt / sqrt(n) limit, uniform square
  double beta_upper = 0.90304; // best proven upper bound, reference only
};

// Expected distance to the k-th nearest of n uniform points in a unit-volume
// D-ball model, via log-gamma. Requires 1 <= k < n and D >= 1.
double expected_rk(long long n, int k, int dim = 2);
// Large-n form for D = 2: Gamma(k + 1/2) / (Gamma(k) sqrt(n pi)).
double expected_rk_asymptotic(long long n, int k);
double expected_rk2(long long n, int k, int dim = 2);

// Normalized density of r_1 for D = 2, zero outside [0, 1/sqrt(pi)].
double pdf_r1(long long n, double r);
double cdf_r1(long long n, double r);
double mode_r1(long long n);

struct LowerBound {
  double value = 0.0;
  bool vacuous = false;
};

// (27 - 32 beta) / 7. For beta >= 27/32 the bound is vacuous: returns 0 and
// warns. Throws Error(kInvalidInput) for beta <= 0 or non-finite beta.
LowerBound rho_lower_bound(double beta);

// Two-sided one-sample Kolmogorov-Smirnov statistic sup|F_n - F|.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);
// Asymptotic p-value with the small-sample correction of Stephens.
double ks_pvalue(double statistic, std::size_t sample_size);

}  // namespace nnd
