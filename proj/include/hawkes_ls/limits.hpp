#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "hawkes_ls/model.hpp"

namespace hawkes_ls {

/// Limit objects on an equispaced grid u_0 = 0 < ... < u_{n-1} = 1.
///   lln[i] = L(u_i) = int_0^{u_i} (Id - K(x))^{-1} mu(x) dx
///   cov[i] = C(u_i) = int_0^{u_i} A Sigma A^T dx, A = (Id - K)^{-1}, Sigma = Diag(A mu)
/// Each grid cell is integrated with 8-point Gauss-Legendre after splitting at
/// the knots of tabulated curves, so the cumulative values are exact to
/// rounding for smooth curves at the default 512 nodes.
struct LimitCurve {
  std::vector<double> u;
  std::vector<Eigen::VectorXd> lln;
  std::vector<Eigen::MatrixXd> cov;  // empty unless requested

  std::size_t size() const noexcept { return u.size(); }
  /// Linear interpolation of L at u in [0, 1]. Throws DomainError.
  Eigen::VectorXd lln_at(double x) const;
};

inline constexpr std::size_t kLimitNodes = 512;

/// L only. Throws DomainError (n_nodes < 2), SingularMatrix.
LimitCurve lln_curve(const ModelSpec& spec, std::size_t n_nodes = kLimitNodes);

/// L and C on the same grid.
LimitCurve limit_curve(const ModelSpec& spec, std::size_t n_nodes = kLimitNodes);

/// C(u) over [0, u] split into n_nodes - 1 cells. Throws DomainError.
Eigen::MatrixXd clt_covariance(const ModelSpec& spec, double u,
                               std::size_t n_nodes = kLimitNodes);

/// Sigma(x) = Diag((Id - K(x))^{-1} mu(x)).
Eigen::MatrixXd fluctuation_diag(const ModelSpec& spec, double x);

/// max_k |L_k(1)| at n_nodes minus the same at 2 n_nodes - 1 (the grid halved).
double lln_refinement_change(const ModelSpec& spec, std::size_t n_nodes = kLimitNodes);

/// Euler-Maruyama path of X(u) = int_0^u A(s) Sigma^{1/2}(s) dW_s on n_steps
/// equal steps, coefficients frozen at the left end of each step.
struct LimitPath {
  std::vector<double> u;
  std::vector<Eigen::VectorXd> x;
};

/// Throws DomainError (n_steps == 0).
LimitPath sample_limit_path(const ModelSpec& spec, std::uint64_t seed, std::size_t n_steps);

/// CSV: u, L_1..L_p, then C_11..C_pp row-major when the covariance is present.
void write_csv(const LimitCurve& curve, std::ostream& out);
/// CSV: u, X_1..X_p.
void write_csv(const LimitPath& path, std::ostream& out);

}  // namespace hawkes_ls
