#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "ckx/errors.hpp"
#include "ckx/stats.hpp"

using namespace ckx;

TEST_CASE("mean variance stddev basics") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  CHECK(stats::mean(xs) == doctest::Approx(2.5));
  CHECK(stats::variance(xs) == doctest::Approx(5.0 / 3.0));
  CHECK(stats::stddev(xs) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  const std::vector<double> ys{1.0, 2.0, 2.5, 3.0, 4.5, 0.5, 2.2, 3.3};
  CHECK(stats::variance(ys) == doctest::Approx(1.6221428571428571).epsilon(1e-14));
}

TEST_CASE("excess kurtosis matches reference and vanishes for a gaussian") {
  const std::vector<double> ys{1.0, 2.0, 2.5, 3.0, 4.5, 0.5, 2.2, 3.3};
  CHECK(stats::excess_kurtosis(ys) ==
        doctest::Approx(-0.68998055430978278).epsilon(1e-12));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<double> xs(200000);
  for (auto& x : xs) x = g(rng);
  CHECK(std::fabs(stats::excess_kurtosis(xs)) < 5.0 * std::sqrt(24.0 / 200000.0));
  CHECK_THROWS_AS(stats::excess_kurtosis({1.0, 2.0, 3.0}), domain_error);
}

TEST_CASE("batch means se on a hand case") {
  // Two batches of two: means 1.5 and 3.5, sd sqrt(2), se 1.
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  CHECK(stats::batch_means_se(xs, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(stats::batch_means_se(xs, 4), domain_error);
  CHECK_THROWS_AS(stats::batch_means_se(xs, 0), domain_error);
}

TEST_CASE("batch means se tracks the iid standard error") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::vector<double> xs(100000);
  for (auto& x : xs) x = g(rng);
  const double se = stats::batch_means_se(xs, 100);
  const double expected = 1.0 / std::sqrt(100000.0);
  CHECK(se == doctest::Approx(expected).epsilon(0.25));
}

TEST_CASE("wilson interval reference values") {
  const auto iv = stats::wilson_interval(525, 1000);
  CHECK(iv.lo == doctest::Approx(0.49401247046123636).epsilon(1e-12));
  CHECK(iv.hi == doctest::Approx(0.55579619161448601).epsilon(1e-12));
  const auto small = stats::wilson_interval(9, 10);
  CHECK(small.lo == doctest::Approx(0.59584997320476152).epsilon(1e-12));
  CHECK(small.hi == doctest::Approx(0.98212378690492708).epsilon(1e-12));
  CHECK_THROWS_AS(stats::wilson_interval(0, 0), domain_error);
}

TEST_CASE("wilson interval properties") {
  const auto a = stats::wilson_interval(50, 100);
  const auto b = stats::wilson_interval(500, 1000);
  CHECK(a.contains(0.5));
  CHECK(b.contains(0.5));
  CHECK(b.hi - b.lo < a.hi - a.lo);  // shrinks with n
  const auto zero = stats::wilson_interval(0, 10);
  const auto all = stats::wilson_interval(10, 10);
  CHECK(zero.lo == doctest::Approx(0.0));
  CHECK(all.hi == doctest::Approx(1.0));
}

TEST_CASE("incomplete beta reference values") {
  CHECK(stats::incomplete_beta(2.0, 3.0, 0.3) ==
        doctest::Approx(0.34829999999999994).epsilon(1e-12));
  CHECK(stats::incomplete_beta(5.0, 2.0, 0.7) ==
        doctest::Approx(0.42017499999999991).epsilon(1e-12));
  CHECK(stats::incomplete_beta(0.5, 0.5, 0.25) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(stats::incomplete_beta(2.0, 3.0, 0.0) == doctest::Approx(0.0));
  CHECK(stats::incomplete_beta(2.0, 3.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("binomial tail reference values") {
  CHECK(stats::binomial_sf(600, 1000, 0.5) ==
        doctest::Approx(1.364232078032988e-10).epsilon(1e-9));
  CHECK(stats::binomial_sf(9, 10, 0.5) ==
        doctest::Approx(0.0107421875).epsilon(1e-12));
  CHECK(stats::binomial_sf(60, 100, 0.3) ==
        doctest::Approx(5.1299498155831269e-10).epsilon(1e-9));
  CHECK(stats::binomial_sf(0, 50, 0.5) == doctest::Approx(1.0));
  CHECK(stats::binomial_sf(51, 50, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("binomial tail is monotone in the count") {
  double prev = 1.0;
  for (std::uint64_t k = 0; k <= 100; k += 10) {
    const double p = stats::binomial_sf(k, 100, 0.5);
    CHECK(p <= prev + 1e-15);
    prev = p;
  }
}

TEST_CASE("one sided binomial test behavior") {
  CHECK(stats::binomial_test_greater(500, 1000, 0.5) ==
        doctest::Approx(stats::binomial_sf(500, 1000, 0.5)));
  CHECK(stats::binomial_test_greater(500, 1000, 0.5) > 0.4);
  CHECK(stats::binomial_test_greater(600, 1000, 0.5) < 1e-9);
  CHECK(stats::binomial_test_greater(100, 100, 0.5) < 1e-30);
}

TEST_CASE("two sample ks test on fixed arrays") {
  const std::vector<double> a{0.1, 0.4, 0.7, 1.1, 1.5, 1.9, 2.3, 2.6};
  const std::vector<double> b{0.0, 0.5, 0.9, 1.0, 1.2,
                              1.3, 1.4, 1.6, 2.9, 3.1};
  const auto r = stats::ks_two_sample(a, b);
  CHECK(r.statistic == doctest::Approx(0.2).epsilon(1e-12));
  // Asymptotic reference 0.98785; the small-sample factor shifts it slightly.
  CHECK(r.p_value == doctest::Approx(0.98785).epsilon(0.01));
}

TEST_CASE("ks test separates shifted samples and accepts identical ones") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> a(4000), b(4000), c(4000);
  for (auto& x : a) x = g(rng);
  for (auto& x : b) x = g(rng) + 0.2;
  for (auto& x : c) x = g(rng);
  CHECK(stats::ks_two_sample(a, b).p_value < 1e-6);
  CHECK(stats::ks_two_sample(a, c).p_value > 0.01);
}
