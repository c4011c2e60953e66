#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hawkes_ls/curve.hpp"
#include "hawkes_ls/kernel.hpp"
#include "hawkes_ls/model.hpp"

namespace hawkes_ls {

/// Matrix-valued function on the uniform grid t_j = j h, j < n. Entries are
/// stored flat; each node is a rows x cols block viewed through Eigen::Map.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(double h, std::size_t n, std::size_t rows, std::size_t cols);

  double step() const noexcept { return h_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double t(std::size_t j) const noexcept { return static_cast<double>(j) * h_; }

  Eigen::Map<Eigen::MatrixXd> operator[](std::size_t j) {
    return {data_.data() + j * block(), static_cast<Eigen::Index>(rows_),
            static_cast<Eigen::Index>(cols_)};
  }
  Eigen::Map<const Eigen::MatrixXd> operator[](std::size_t j) const {
    return {data_.data() + j * block(), static_cast<Eigen::Index>(rows_),
            static_cast<Eigen::Index>(cols_)};
  }

  /// Linear interpolation between nodes. Throws GridOutOfRange outside [0, t_{n-1}].
  Eigen::MatrixXd at(double t) const;

  /// Composite trapezoid over the whole grid.
  Eigen::MatrixXd integral() const;

  /// Largest |entry| over all nodes.
  double max_abs() const;

 private:
  std::size_t block() const noexcept { return rows_ * cols_; }

  double h_ = 0.0;
  std::size_t n_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Lower-triangular p x p Volterra kernel on the square grid t_i = i h,
/// entries (i, j) for j <= i; entries above the diagonal are zero by definition.
class TriKernel {
 public:
  TriKernel() = default;
  TriKernel(double h, std::size_t n, std::size_t p);

  double step() const noexcept { return h_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return p_; }

  Eigen::Map<Eigen::MatrixXd> operator()(std::size_t i, std::size_t j) {
    return {data_.data() + offset(i, j), static_cast<Eigen::Index>(p_),
            static_cast<Eigen::Index>(p_)};
  }
  Eigen::Map<const Eigen::MatrixXd> operator()(std::size_t i, std::size_t j) const {
    return {data_.data() + offset(i, j), static_cast<Eigen::Index>(p_),
            static_cast<Eigen::Index>(p_)};
  }

  /// Samples k(t_i, s_j) for j <= i.
  template <class F>
  static TriKernel sample(double h, std::size_t n, std::size_t p, F&& k) {
    TriKernel out(h, n, p);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) out(i, j) = k(out.t(i), out.t(j));
    return out;
  }

  double t(std::size_t i) const noexcept { return static_cast<double>(i) * h_; }
  double max_abs() const;
  double min_entry() const;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const noexcept {
    return (i * (i + 1) / 2 + j) * p_ * p_;
  }

  double h_ = 0.0;
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<double> data_;
};

/// (a * b)(t_i, s_j) = int_{s_j}^{t_i} a(t_i, u) b(u, s_j) du by the trapezoid
/// rule on the grid nodes. Throws GridMismatch.
TriKernel star_product(const TriKernel& a, const TriKernel& b);

/// Psi solving Psi = k + k * Psi with k(t) = g0 o phi(t), by forward
/// substitution with trapezoid weights on t_j = j h, j < n.
/// Throws Unstable (rho(g0 o int phi) >= 1) and GridTooCoarse (the implicit
/// diagonal step h/2 k(0) is not a contraction, or the solution is negative or
/// fails its discrete self-consistency check).
GridFunction conv_resolvent(const KernelMatrix& phi, const Eigen::MatrixXd& g0, double h,
                            std::size_t n);

/// The same discrete renewal equation solved by summing its Neumann series
/// sum_{m >= 0} C^m k until the geometric tail bound rho^m / (1 - rho) drops
/// below 1e-12. O(n^2) per term; meant as an oracle on modest grids.
GridFunction conv_resolvent_neumann(const KernelMatrix& phi, const Eigen::MatrixXd& g0, double h,
                                    std::size_t n);

/// conv_resolvent with g0 the coordinatewise sup of g.
GridFunction bounding_resolvent(const ModelSpec& spec, double h, std::size_t n);

/// Grid of step h over [0, T]: n = T / h + 1 nodes. Throws GridMismatch when
/// T / h is not an integer (relative slack 1e-9).
std::size_t horizon_nodes(double horizon, double h);

/// K^T solving K = k + k * K on the triangle, k(t, s) = g(t/T) o phi(t - s).
/// Throws GridMismatch, GridTooCoarse, RuntimeBudgetExceeded (triangle too large).
TriKernel volterra_resolvent(const ModelSpec& spec, double h);

/// Largest max_ij [K(t_i, s_j) - bound(t_i - s_j)] over the triangle, entry by
/// entry. Nonpositive means K is dominated. Throws GridMismatch.
double domination_excess(const TriKernel& k, const GridFunction& bound);

/// Mean intensity E[lambda(t)] (p x 1 per node) and mean count E[N(t)].
struct MeanPath {
  GridFunction intensity;
  GridFunction count;
};

/// Solves x = mu(t/T) + int_0^t g(t/T) o phi(t - s) x(s) ds directly (O(n^2)),
/// which is the resolvent formula mu + int K^T mu without forming the
/// triangle; E[N] by cumulative trapezoid. Throws GridMismatch, GridTooCoarse.
MeanPath mean_intensity(const ModelSpec& spec, double h);

/// The resolvent formula mu(t/T) + int_0^t K^T(t, s) mu(s/T) ds evaluated on
/// a precomputed triangle (cross-check of mean_intensity).
MeanPath mean_intensity_from_resolvent(const ModelSpec& spec, const TriKernel& resolvent);

/// Gamma(x) = (Id - K(x))^{-1} - Id. Throws SingularMatrix.
Eigen::MatrixXd gamma(const ModelSpec& spec, double x);

struct GammaCheck {
  double x = 0.0;
  Eigen::MatrixXd closed_form;
  /// Trapezoid integral of Psi(x, .) over [0, T_max], Richardson-extrapolated
  /// from steps h and 2h, plus the tail estimate.
  Eigen::MatrixXd quadrature;
  double truncation = 0.0;      // T_max
  double tail_estimate = 0.0;   // geometric bound on the neglected tail
  double max_error = 0.0;       // max |quadrature - closed_form|
};

/// Quadrature of Psi(x, .) = resolvent of g(x) o phi against the closed form.
/// T_max = 50 / (beta_min (1 - rho(K(x)))) for kernels with exponential decay;
/// compactly supported kernels use a multiple of their support and power laws
/// the point where the kernel tail mass drops below 1e-7.
GammaCheck gamma_check(const ModelSpec& spec, double x, double h);

struct CesaroPoint {
  double horizon = 0.0;
  Eigen::VectorXd lhs;  // (1/T) int_0^{Tu} int_s^{Tu} K^T(t, s) m(s/T) dt ds
  Eigen::VectorXd rhs;  // int_0^u Gamma(x) m(x) dx
  double error = 0.0;   // max-norm of lhs - rhs
  double error_sqrt_horizon = 0.0;
};

/// The Cesaro functional at each horizon in `horizons` (strictly increasing).
/// The inner integral z(t) = int_0^t K^T(t, s) m(s/T) ds solves
/// z = k * m + k * z, so each horizon costs one O(n^2) solve with step h; the
/// right side integrates Gamma(x) m(x) with Gauss-Legendre on a 512-node grid.
/// Throws DomainError (u outside [0, 1] or horizons not increasing).
std::vector<CesaroPoint> cesaro_check(const ModelSpec& spec, const std::vector<ScalarCurve>& m,
                                      double u, std::span<const double> horizons, double h);

/// CSV: t, then the rows*cols entries of each node row-major.
void write_csv(const GridFunction& f, std::ostream& out);
/// CSV: t, s, then the p*p entries row-major.
void write_csv(const TriKernel& k, std::ostream& out);

}  // namespace hawkes_ls
