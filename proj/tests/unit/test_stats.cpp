#include <doctest.h>

#include <cmath>

#include "hawkes_ls/rng.hpp"
#include "hawkes_ls/stats.hpp"

using namespace hawkes_ls;

TEST_SUITE("stats") {
  TEST_CASE("moments of a fixed sample") {
    const std::vector<double> xs = {1.0, 2.0, 4.0, 8.0};
    CHECK(stats::mean(xs) == doctest::Approx(3.75));
    CHECK(stats::variance(xs) == doctest::Approx(9.583333333333334));
    // Population central moments: m2 = 7.1875, m3 = 12.65625, m4 = 98.20703125.
    CHECK(stats::skewness(xs) == doctest::Approx(12.65625 / std::pow(7.1875, 1.5)));
    CHECK(stats::excess_kurtosis(xs) == doctest::Approx(98.20703125 / (7.1875 * 7.1875) - 3));
    CHECK(stats::quantile(xs, 0.5) == doctest::Approx(3.0));
    CHECK(stats::quantile(xs, 0.0) == 1.0);
    CHECK(stats::quantile(xs, 1.0) == 8.0);
  }

  TEST_CASE("covariance") {
    Eigen::MatrixXd s(4, 2);
    s << 1, 2, 2, 4, 3, 6, 4, 8;
    const Eigen::MatrixXd c = stats::covariance(s);
    CHECK(c(0, 0) == doctest::Approx(5.0 / 3));
    CHECK(c(0, 1) == doctest::Approx(10.0 / 3));
    CHECK(c(1, 1) == doctest::Approx(20.0 / 3));
  }

  TEST_CASE("normal cdf") {
    CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(stats::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  }

  TEST_CASE("exact Kolmogorov p-values") {
    // Reference values: the same recursion in 50-digit mpmath arithmetic.
    CHECK(stats::kolmogorov_pvalue(10, 0.274) == doctest::Approx(0.37152038454349572).epsilon(1e-10));
    CHECK(stats::kolmogorov_pvalue(50, 0.1) == doctest::Approx(0.6623112704658186).epsilon(1e-9));
    CHECK(stats::kolmogorov_pvalue(200, 0.05) == doctest::Approx(0.68026272543955761).epsilon(1e-10));
    CHECK(stats::kolmogorov_pvalue(1000, 0.06) ==
          doctest::Approx(0.0014285978874661178).epsilon(1e-8));
    CHECK(stats::kolmogorov_pvalue(10, 0.0) == 1.0);
    CHECK(stats::kolmogorov_pvalue(10, 1.0) == 0.0);
  }

  TEST_CASE("KS statistic against a known sample") {
    // Uniform cdf; D = max over i of max(i/n - x_(i), x_(i) - (i-1)/n).
    const auto r = stats::ks_test({0.1, 0.2, 0.9}, [](double x) { return x; });
    CHECK(r.statistic == doctest::Approx(0.4666666666666667));
  }

  TEST_CASE("KS p-values are roughly uniform under the null") {
    int below = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
      CounterStream s(99, static_cast<std::uint32_t>(r));
      std::vector<double> xs(100);
      for (auto& x : xs) x = s.exponential(1.0);
      if (stats::ks_test(xs, [](double x) { return -std::expm1(-x); }).pvalue < 0.05) ++below;
    }
    CHECK(below >= 6);
    CHECK(below <= 40);
  }
}
