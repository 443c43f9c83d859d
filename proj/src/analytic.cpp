#include "nnd/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nnd/error.hpp"

namespace nnd {

namespace {

void check_order(long long n, int k, int dim) {
  if (k < 1 || static_cast<long long>(k) >= n) {
    throw Error(ErrorCode::kInvalidInput, "need 1 <= k < n, got k=" + std::to_string(k) +
                                              " n=" + std::to_string(n));
  }
  if (dim < 1) throw Error(ErrorCode::kInvalidInput, "dimension must be >= 1");
}

// E(r_k^p) for the unit-volume ball model.
double moment(long long n, int k, int dim, double p) {
  check_order(n, k, dim);
  const double d = dim;
  const double nn = static_cast<double>(n);
  const double log_value = p / d * std::lgamma(d / 2.0 + 1.0) - p / 2.0 * std::log(std::numbers::pi) +
                           std::lgamma(k + p / d) - std::lgamma(static_cast<double>(k)) +
                           std::lgamma(nn) - std::lgamma(nn + p / d);
  return std::exp(log_value);
}

void check_n(long long n) {
  if (n < 2) throw Error(ErrorCode::kInvalidInput, "need n >= 2");
}

}  // namespace

double expected_rk(long long n, int k, int dim) { return moment(n, k, dim, 1.0); }

double expected_rk2(long long n, int k, int dim) { return moment(n, k, dim, 2.0); }

double expected_rk_asymptotic(long long n, int k) {
  check_order(n, k, 2);
  return std::exp(std::lgamma(k + 0.5) - std::lgamma(static_cast<double>(k))) /
         std::sqrt(static_cast<double>(n) * std::numbers::pi);
}

double pdf_r1(long long n, double r) {
  check_n(n);
  if (!(r >= 0.0) || r > 1.0 / std::sqrt(std::numbers::pi)) return 0.0;
  const double base = std::max(0.0, 1.0 - std::numbers::pi * r * r);
  return 2.0 * std::numbers::pi * static_cast<double>(n - 1) * r *
         std::pow(base, static_cast<double>(n - 2));
}

double cdf_r1(long long n, double r) {
  check_n(n);
  if (!(r > 0.0)) return 0.0;
  const double a = std::numbers::pi * r * r;
  if (a >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n - 1) * std::log1p(-a));
}

double mode_r1(long long n) {
  check_n(n);
  return 1.0 / std::sqrt(std::numbers::pi * static_cast<double>(2 * n - 3));
}

LowerBound rho_lower_bound(double beta) {
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw Error(ErrorCode::kInvalidInput, "beta must be finite and > 0");
  }
  if (beta >= 27.0 / 32.0) {
    warn("lower bound is vacuous for beta >= 27/32 (beta = " + std::to_string(beta) + ")");
    return {0.0, true};
  }
  return {(27.0 - 32.0 * beta) / 7.0, false};
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidInput, "KS test needs samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double m = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

double ks_pvalue(double statistic, std::size_t sample_size) {
  if (sample_size == 0) throw Error(ErrorCode::kInvalidInput, "KS test needs samples");
  const double root = std::sqrt(static_cast<double>(sample_size));
  const double lambda = (root + 0.12 + 0.11 / root) * statistic;
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Dual series, converges fast for small lambda; gives the CDF.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    double cdf = 0.0;
    for (int j = 1; j <= 100; ++j) {
      const double term = std::pow(y, static_cast<double>((2 * j - 1) * (2 * j - 1)));
      cdf += term;
      if (term < 1e-17 * cdf) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace nnd
