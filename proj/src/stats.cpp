#include "hawkes_ls/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hawkes_ls::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs >= 2 observations");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

namespace {

// Central moments m2, m3, m4 with population normalization.
std::array<double, 3> central_moments(std::span<const double> xs) {
  const double m = mean(xs);
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - m;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const auto n = static_cast<double>(xs.size());
  return {m2 / n, m3 / n, m4 / n};
}

}  // namespace

double skewness(std::span<const double> xs) {
  const auto [m2, m3, m4] = central_moments(xs);
  return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

double excess_kurtosis(std::span<const double> xs) {
  const auto [m2, m3, m4] = central_moments(xs);
  return m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2) throw std::invalid_argument("covariance needs >= 2 observations");
  const Eigen::RowVectorXd m = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - m;
  return (centered.transpose() * centered) / static_cast<double>(samples.rows() - 1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

namespace {

// Matrix power with a decimal exponent carried alongside to avoid overflow.
void matrix_power(const Eigen::MatrixXd& a, int ea, Eigen::MatrixXd& v, int& ev, std::size_t n) {
  if (n == 1) {
    v = a;
    ev = ea;
    return;
  }
  matrix_power(a, ea, v, ev, n / 2);
  Eigen::MatrixXd b = v * v;
  int eb = 2 * ev;
  if (n % 2 == 0) {
    v = std::move(b);
    ev = eb;
  } else {
    v = a * b;
    ev = ea + eb;
  }
  const Eigen::Index c = v.rows() / 2;
  if (v(c, c) > 1e140) {
    v *= 1e-140;
    ev += 140;
  }
}

}  // namespace

double kolmogorov_pvalue(std::size_t n, double d) {
  if (n == 0 || d <= 0.0) return 1.0;
  if (d >= 1.0) return 0.0;
  const auto nd = static_cast<double>(n);
  const double s2 = d * d * nd;
  if (s2 > 7.24 || (s2 > 3.76 && n > 99)) {
    return std::min(1.0, 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(nd) + 1.409 / nd) * s2));
  }
  const int k = static_cast<int>(nd * d) + 1;
  const int m = 2 * k - 1;
  const double h = k - nd * d;
  Eigen::MatrixXd hm(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) hm(i, j) = (i - j + 1 < 0) ? 0.0 : 1.0;
  for (int i = 0; i < m; ++i) {
    hm(i, 0) -= std::pow(h, i + 1);
    hm(m - 1, i) -= std::pow(h, m - i);
  }
  hm(m - 1, 0) += (2.0 * h - 1.0 > 0.0) ? std::pow(2.0 * h - 1.0, m) : 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i - j + 1 > 0)
        for (int g = 1; g <= i - j + 1; ++g) hm(i, j) /= g;
  Eigen::MatrixXd q;
  int eq = 0;
  matrix_power(hm, 0, q, eq, n);
  double s = q(k - 1, k - 1);
  for (std::size_t i = 1; i <= n; ++i) {
    s = s * static_cast<double>(i) / nd;
    if (s < 1e-140) {
      s *= 1e140;
      eq -= 140;
    }
  }
  const double cdf = s * std::pow(10.0, eq);
  return std::clamp(1.0 - cdf, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> xs, const std::function<double(double)>& cdf) {
  KsResult out;
  const std::size_t n = xs.size();
  out.statistic = ks_statistic(std::move(xs), cdf);
  out.pvalue = kolmogorov_pvalue(n, out.statistic);
  return out;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * xs[lo] + w * xs[hi];
}

}  // namespace hawkes_ls::stats
