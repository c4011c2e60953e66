#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hawkes_ls::stats {

double mean(std::span<const double> xs);
/// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> xs);
/// Sample skewness g1 = m3 / m2^{3/2} (population moments).
double skewness(std::span<const double> xs);
/// Sample excess kurtosis g2 = m4 / m2^2 - 3.
double excess_kurtosis(std::span<const double> xs);

/// Unbiased covariance of the columns of `samples` (rows are observations).
Eigen::MatrixXd covariance(const Eigen::MatrixXd& samples);

double normal_cdf(double x);

/// Two-sided one-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf);

/// P(D_n >= d) under the null: exact Marsaglia-Tsang-Wang recursion.
double kolmogorov_pvalue(std::size_t n, double d);

struct KsResult {
  double statistic = 0.0;
  double pvalue = 1.0;
};

KsResult ks_test(std::vector<double> xs, const std::function<double(double)>& cdf);

/// Linear-interpolation (type 7) quantile of unsorted data.
double quantile(std::vector<double> xs, double q);

}  // namespace hawkes_ls::stats
