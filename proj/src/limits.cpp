#include "hawkes_ls/limits.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <variant>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/quadrature.hpp"
#include "hawkes_ls/rng.hpp"
#include "hawkes_ls/text.hpp"

namespace hawkes_ls {

namespace {

constexpr std::uint64_t kLimitPathDomain = 0x4C494D4954504154ULL;

/// Sorted knots of every tabulated mu or g coordinate, where the integrands
/// have kinks.
std::vector<double> curve_knots(const ModelSpec& spec) {
  std::vector<double> out;
  auto add = [&](const ScalarCurve& c) {
    if (const auto* tab = std::get_if<Table>(&c.form()))
      out.insert(out.end(), tab->knots.begin(), tab->knots.end());
  };
  for (const auto& m : spec.baseline) add(m);
  for (std::size_t k = 0; k < spec.p; ++k)
    for (std::size_t l = 0; l < spec.p; ++l) add(spec.reproduction(k, l));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// GL8 over [a, b], split at any knots strictly inside.
template <class F, class T>
T integrate_cell(F&& f, double a, double b, const std::vector<double>& knots, T zero) {
  const auto& gl = gauss_legendre8();
  T sum = zero;
  double lo = a;
  auto piece = [&](double x0, double x1) {
    const double half = 0.5 * (x1 - x0);
    const double mid = 0.5 * (x0 + x1);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
      sum += (half * gl.weights[i]) * f(mid + half * gl.nodes[i]);
  };
  for (auto it = std::upper_bound(knots.begin(), knots.end(), a);
       it != knots.end() && *it < b; ++it) {
    piece(lo, *it);
    lo = *it;
  }
  piece(lo, b);
  return sum;
}

std::vector<double> grid(double upper, std::size_t n) {
  if (n < 2) throw DomainError("a limit grid needs at least 2 nodes");
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i)
    u[i] = upper * static_cast<double>(i) / static_cast<double>(n - 1);
  u.back() = upper;
  return u;
}

Eigen::MatrixXd covariance_density(const ModelSpec& spec, double x) {
  const Eigen::MatrixXd a = stationary_response(spec, x);
  const Eigen::VectorXd rate = a * baseline_at(spec, x);
  return a * rate.asDiagonal() * a.transpose();
}

LimitCurve build(const ModelSpec& spec, std::size_t n, bool with_cov) {
  LimitCurve out;
  out.u = grid(1.0, n);
  const auto knots = curve_knots(spec);
  const auto p = static_cast<Eigen::Index>(spec.p);
  out.lln.assign(n, Eigen::VectorXd::Zero(p));
  if (with_cov) out.cov.assign(n, Eigen::MatrixXd::Zero(p, p));
  for (std::size_t i = 1; i < n; ++i) {
    const double a = out.u[i - 1];
    const double b = out.u[i];
    out.lln[i] = out.lln[i - 1] +
                 integrate_cell([&](double x) { return lln_rate_at(spec, x); }, a, b, knots,
                                Eigen::VectorXd::Zero(p).eval());
    if (with_cov) {
      out.cov[i] = out.cov[i - 1] +
                   integrate_cell([&](double x) { return covariance_density(spec, x); }, a, b,
                                  knots, Eigen::MatrixXd::Zero(p, p).eval());
      out.cov[i] = 0.5 * (out.cov[i] + out.cov[i].transpose()).eval();
    }
  }
  return out;
}

}  // namespace

Eigen::VectorXd LimitCurve::lln_at(double x) const {
  if (!(x >= 0.0 && x <= 1.0) || u.size() < 2)
    throw DomainError("LLN curve queried at u = " + format_double(x));
  const double pos = x * static_cast<double>(u.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), u.size() - 2);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * lln[i] + w * lln[i + 1];
}

LimitCurve lln_curve(const ModelSpec& spec, std::size_t n_nodes) {
  return build(spec, n_nodes, false);
}

LimitCurve limit_curve(const ModelSpec& spec, std::size_t n_nodes) {
  return build(spec, n_nodes, true);
}

Eigen::MatrixXd clt_covariance(const ModelSpec& spec, double u, std::size_t n_nodes) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("u = " + format_double(u) + " outside [0, 1]");
  const auto p = static_cast<Eigen::Index>(spec.p);
  const auto xs = grid(u, n_nodes);
  const auto knots = curve_knots(spec);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t i = 1; i < xs.size(); ++i)
    c += integrate_cell([&](double x) { return covariance_density(spec, x); }, xs[i - 1], xs[i],
                        knots, Eigen::MatrixXd::Zero(p, p).eval());
  return 0.5 * (c + c.transpose());
}

Eigen::MatrixXd fluctuation_diag(const ModelSpec& spec, double x) {
  return lln_rate_at(spec, x).asDiagonal();
}

double lln_refinement_change(const ModelSpec& spec, std::size_t n_nodes) {
  const auto coarse = lln_curve(spec, n_nodes);
  const auto fine = lln_curve(spec, 2 * n_nodes - 1);
  return (coarse.lln.back() - fine.lln.back()).cwiseAbs().maxCoeff();
}

LimitPath sample_limit_path(const ModelSpec& spec, std::uint64_t seed, std::size_t n_steps) {
  if (n_steps == 0) throw DomainError("sample_limit_path needs at least one step");
  const auto p = static_cast<Eigen::Index>(spec.p);
  LimitPath out;
  out.u = grid(1.0, n_steps + 1);
  out.x.assign(n_steps + 1, Eigen::VectorXd::Zero(p));
  CounterStream rng(seed ^ kLimitPathDomain, 0);
  const double dt = 1.0 / static_cast<double>(n_steps);
  Eigen::VectorXd dw(p);
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double s = out.u[i];
    const Eigen::MatrixXd a = stationary_response(spec, s);
    const Eigen::VectorXd root = (a * baseline_at(spec, s)).cwiseMax(0.0).cwiseSqrt();
    for (Eigen::Index k = 0; k < p; ++k) dw(k) = std::sqrt(dt) * rng.normal();
    out.x[i + 1] = out.x[i] + a * root.cwiseProduct(dw);
  }
  return out;
}

void write_csv(const LimitCurve& curve, std::ostream& out) {
  const std::size_t p = curve.lln.empty() ? 0 : static_cast<std::size_t>(curve.lln[0].size());
  out << 'u';
  for (std::size_t k = 0; k < p; ++k) out << ",L_" << k + 1;
  if (!curve.cov.empty())
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t l = 0; l < p; ++l) out << ",C_" << k + 1 << '_' << l + 1;
  out << '\n';
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << format_double(curve.u[i]);
    for (Eigen::Index k = 0; k < curve.lln[i].size(); ++k)
      out << ',' << format_double(curve.lln[i](k));
    if (!curve.cov.empty())
      for (Eigen::Index k = 0; k < curve.cov[i].rows(); ++k)
        for (Eigen::Index l = 0; l < curve.cov[i].cols(); ++l)
          out << ',' << format_double(curve.cov[i](k, l));
    out << '\n';
  }
}

void write_csv(const LimitPath& path, std::ostream& out) {
  const auto p = path.x.empty() ? 0 : path.x[0].size();
  out << 'u';
  for (Eigen::Index k = 0; k < p; ++k) out << ",X_" << k + 1;
  out << '\n';
  for (std::size_t i = 0; i < path.u.size(); ++i) {
    out << format_double(path.u[i]);
    for (Eigen::Index k = 0; k < p; ++k) out << ',' << format_double(path.x[i](k));
    out << '\n';
  }
}

}  // namespace hawkes_ls
