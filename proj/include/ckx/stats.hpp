#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ckx::stats {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs);  // unbiased, n-1
double stddev(const std::vector<double>& xs);

// Fourth standardized moment minus 3; 0 for a Gaussian.
double excess_kurtosis(const std::vector<double>& xs);

// Standard error of the mean of a correlated series, estimated from the
// scatter of non-overlapping batch means.
double batch_means_se(const std::vector<double>& xs, std::size_t batch_len);

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                         double z = 1.959963984540054);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// P(X >= k) for X ~ Binomial(n, p). Exact via the incomplete beta.
double binomial_sf(std::uint64_t k, std::uint64_t n, double p);

// One-sided binomial test: p-value of observing >= successes under
// Binomial(trials, p0).
double binomial_test_greater(std::uint64_t successes, std::uint64_t trials,
                             double p0);

struct KsResult {
  double statistic = 0.0;  // sup |F1 - F2|
  double p_value = 1.0;    // asymptotic
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace ckx::stats
