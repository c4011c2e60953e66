#include "hawkes_ls/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <variant>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/quadrature.hpp"
#include "hawkes_ls/text.hpp"

namespace hawkes_ls {

GridFunction::GridFunction(double h, std::size_t n, std::size_t rows, std::size_t cols)
    : h_(h), n_(n), rows_(rows), cols_(cols), data_(n * rows * cols, 0.0) {}

Eigen::MatrixXd GridFunction::at(double t) const {
  if (n_ == 0) throw GridOutOfRange("empty grid function");
  const double last = this->t(n_ - 1);
  if (!(t >= 0.0 && t <= last * (1.0 + 1e-12)))
    throw GridOutOfRange("t = " + format_double(t) + " outside the grid [0, " +
                         format_double(last) + "]");
  if (n_ == 1) return (*this)[0];
  const double pos = std::min(t / h_, static_cast<double>(n_ - 1));
  const auto j = std::min(static_cast<std::size_t>(pos), n_ - 2);
  const double w = pos - static_cast<double>(j);
  return (1.0 - w) * (*this)[j] + w * (*this)[j + 1];
}

Eigen::MatrixXd GridFunction::integral() const {
  Eigen::MatrixXd sum =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  if (n_ < 2) return sum;
  for (std::size_t j = 1; j + 1 < n_; ++j) sum += (*this)[j];
  sum += 0.5 * ((*this)[0] + (*this)[n_ - 1]);
  return h_ * sum;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

TriKernel::TriKernel(double h, std::size_t n, std::size_t p)
    : h_(h), n_(n), p_(p), data_(n * (n + 1) / 2 * p * p, 0.0) {}

double TriKernel::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double TriKernel::min_entry() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : data_) m = std::min(m, v);
  return data_.empty() ? 0.0 : m;
}

namespace {

using Index = Eigen::Index;

void check_step(double h, std::size_t n) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("grid step must be positive");
  if (n == 0) throw DomainError("grid needs at least one node");
}

/// A p x p sequence stored flat, column-major per node.
struct MatrixSeq {
  std::size_t p;
  std::vector<double> v;

  MatrixSeq(std::size_t p, std::size_t n) : p(p), v(n * p * p, 0.0) {}
  double* operator[](std::size_t j) { return v.data() + j * p * p; }
  const double* operator[](std::size_t j) const { return v.data() + j * p * p; }
  Eigen::Map<const Eigen::MatrixXd> mat(std::size_t j) const {
    return {(*this)[j], static_cast<Index>(p), static_cast<Index>(p)};
  }
};

/// Kernel value used by trapezoid sums: at an interior histogram bin edge that
/// falls on a node, the mean of the two one-sided limits, which keeps the
/// rule second order across the jump.
double node_value(const Kernel& phi, double t, double h) {
  const auto* hist = std::get_if<Histogram>(&phi.form());
  if (hist == nullptr || t <= 0.0) return phi(t);
  const double edge = std::round(t / hist->width);
  if (edge < 1.0 || std::abs(t - edge * hist->width) > 1e-9 * h) return phi(t);
  return 0.5 * (phi(t - 0.5 * h) + phi(t + 0.5 * h));
}

/// Phi_d = phi(t_d) coordinatewise.
MatrixSeq sample_kernel(const KernelMatrix& phi, double h, std::size_t n) {
  const std::size_t p = phi.dim();
  MatrixSeq out(p, n);
  for (std::size_t d = 0; d < n; ++d) {
    const double t = static_cast<double>(d) * h;
    double* blk = out[d];
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t l = 0; l < p; ++l) blk[k + l * p] = node_value(phi(k, l), t, h);
  }
  return out;
}

/// G_i = g(t_i / T) coordinatewise.
MatrixSeq sample_reproduction(const ModelSpec& spec, double h, std::size_t n) {
  const std::size_t p = spec.p;
  MatrixSeq out(p, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::min(1.0, static_cast<double>(i) * h / spec.horizon);
    double* blk = out[i];
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t l = 0; l < p; ++l) blk[k + l * p] = spec.reproduction(k, l)(x);
  }
  return out;
}

/// LU of Id - (h/2) k0, refusing steps where the implicit diagonal term is not
/// a strong contraction.
Eigen::PartialPivLU<Eigen::MatrixXd> implicit_step(const Eigen::MatrixXd& k0, double h) {
  const Eigen::MatrixXd half = 0.5 * h * k0;
  if (spectral_radius(half) >= 0.5)
    throw GridTooCoarse("grid step " + format_double(h) +
                        " too coarse: rho(h/2 k(0)) >= 0.5 makes the implicit trapezoid step unreliable");
  const Index p = k0.rows();
  return Eigen::PartialPivLU<Eigen::MatrixXd>(Eigen::MatrixXd::Identity(p, p) - half);
}

/// acc += a * b for p x p column-major blocks.
inline void gemm_acc(double* acc, const double* a, const double* b, std::size_t p, double w = 1.0) {
  for (std::size_t c = 0; c < p; ++c)
    for (std::size_t col = 0; col < p; ++col) {
      const double bv = w * b[c + col * p];
      if (bv == 0.0) continue;
      for (std::size_t r = 0; r < p; ++r) acc[r + col * p] += a[r + c * p] * bv;
    }
}

/// Trapezoid convolution sum h [1/2 k_i f_0 + sum_{j=1}^{i-1} k_{i-j} f_j]
/// (everything except the implicit diagonal term).
void explicit_conv(const MatrixSeq& k, const MatrixSeq& f, std::size_t i, double h, double* out) {
  const std::size_t p = k.p;
  std::fill(out, out + p * p, 0.0);
  if (i == 0) return;
  if (p == 1) {
    const double* kv = k.v.data();
    const double* fv = f.v.data();
    double s = 0.5 * kv[i] * fv[0];
    for (std::size_t j = 1; j < i; ++j) s += kv[i - j] * fv[j];
    out[0] = h * s;
    return;
  }
  gemm_acc(out, k[i], f[0], p, 0.5);
  for (std::size_t j = 1; j < i; ++j) gemm_acc(out, k[i - j], f[j], p);
  for (std::size_t e = 0; e < p * p; ++e) out[e] *= h;
}

double max_abs(const double* v, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

/// Nodes at which solvers re-evaluate their equation as a self-consistency check.
std::vector<std::size_t> check_nodes(std::size_t n) {
  std::vector<std::size_t> out;
  const std::size_t count = std::min<std::size_t>(n, 64);
  for (std::size_t c = 0; c < count; ++c) out.push_back(count == 1 ? 0 : c * (n - 1) / (count - 1));
  return out;
}

MatrixSeq scaled_kernel(const KernelMatrix& phi, const Eigen::MatrixXd& g0, double h,
                        std::size_t n) {
  const std::size_t p = phi.dim();
  if (static_cast<std::size_t>(g0.rows()) != p || static_cast<std::size_t>(g0.cols()) != p)
    throw DomainError("scale matrix must be p x p");
  if ((g0.array() < 0.0).any()) throw DomainError("scale matrix must be nonnegative");
  const Eigen::MatrixXd b = g0.cwiseProduct(kernel_integral(phi));
  const double rho = spectral_radius(b);
  if (rho >= 1.0) throw Unstable(rho);
  MatrixSeq k = sample_kernel(phi, h, n);
  for (std::size_t d = 0; d < n; ++d) {
    double* blk = k[d];
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t c = 0; c < p; ++c)
        blk[a + c * p] *= g0(static_cast<Index>(a), static_cast<Index>(c));
  }
  return k;
}

GridFunction to_grid(const MatrixSeq& s, double h, std::size_t n) {
  GridFunction out(h, n, s.p, s.p);
  for (std::size_t j = 0; j < n; ++j) out[j] = s.mat(j);
  return out;
}

}  // namespace

TriKernel star_product(const TriKernel& a, const TriKernel& b) {
  if (a.size() != b.size() || a.dim() != b.dim() || a.step() != b.step())
    throw GridMismatch("star product of kernels on different grids");
  const std::size_t n = a.size();
  const std::size_t p = a.dim();
  const double h = a.step();
  TriKernel out(h, n, p);
  Eigen::MatrixXd acc(static_cast<Index>(p), static_cast<Index>(p));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      acc = 0.5 * (a(i, j) * b(j, j) + a(i, i) * b(i, j));
      for (std::size_t m = j + 1; m < i; ++m) acc.noalias() += a(i, m) * b(m, j);
      out(i, j) = h * acc;
    }
  return out;
}

GridFunction conv_resolvent(const KernelMatrix& phi, const Eigen::MatrixXd& g0, double h,
                            std::size_t n) {
  check_step(h, n);
  const std::size_t p = phi.dim();
  const MatrixSeq k = scaled_kernel(phi, g0, h, n);
  const auto lu = implicit_step(k.mat(0), h);
  MatrixSeq psi(p, n);
  std::copy(k[0], k[0] + p * p, psi[0]);
  std::vector<double> acc(p * p);
  for (std::size_t i = 1; i < n; ++i) {
    explicit_conv(k, psi, i, h, acc.data());
    Eigen::Map<Eigen::MatrixXd> rhs(acc.data(), static_cast<Index>(p), static_cast<Index>(p));
    rhs += k.mat(i);
    Eigen::Map<Eigen::MatrixXd>(psi[i], static_cast<Index>(p), static_cast<Index>(p)) = lu.solve(rhs);
  }

  // Re-evaluate the discrete equation at spread-out nodes.
  const double scale = std::max(1.0, max_abs(psi.v.data(), psi.v.size()));
  for (std::size_t i : check_nodes(n)) {
    explicit_conv(k, psi, i, h, acc.data());
    Eigen::Map<Eigen::MatrixXd> rhs(acc.data(), static_cast<Index>(p), static_cast<Index>(p));
    if (i > 0) rhs += 0.5 * h * k.mat(0) * psi.mat(i);
    rhs += k.mat(i);
    const double residual = (psi.mat(i) - rhs).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-8 * scale))
      throw GridTooCoarse("renewal equation residual " + format_double(residual) +
                          " exceeds 1e-8 at node " + std::to_string(i));
  }
  for (double v : psi.v)
    if (!(v >= -1e-12 * scale)) throw GridTooCoarse("resolvent has negative entries on this grid");
  return to_grid(psi, h, n);
}

GridFunction conv_resolvent_neumann(const KernelMatrix& phi, const Eigen::MatrixXd& g0, double h,
                                    std::size_t n) {
  check_step(h, n);
  const std::size_t p = phi.dim();
  const MatrixSeq k = scaled_kernel(phi, g0, h, n);
  const double rho = spectral_radius(g0.cwiseProduct(kernel_integral(phi)));
  MatrixSeq sum(p, n);
  MatrixSeq term = k;
  MatrixSeq next(p, n);
  std::vector<double> acc(p * p);
  double tail = 1.0 / (1.0 - rho);
  for (int iter = 0; iter < 100000; ++iter) {
    for (std::size_t e = 0; e < sum.v.size(); ++e) sum.v[e] += term.v[e];
    const double term_size = max_abs(term.v.data(), term.v.size());
    tail *= rho;
    if (tail < 1e-12 && term_size <= 1e-13 * std::max(1.0, max_abs(sum.v.data(), sum.v.size())))
      break;
    if (term_size == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) {
      explicit_conv(k, term, i, h, acc.data());
      if (i > 0) gemm_acc(acc.data(), k[0], term[i], p, 0.5 * h);
      std::copy(acc.begin(), acc.end(), next[i]);
    }
    std::swap(term.v, next.v);
  }
  return to_grid(sum, h, n);
}

GridFunction bounding_resolvent(const ModelSpec& spec, double h, std::size_t n) {
  return conv_resolvent(spec.kernel, reproduction_sup(spec), h, n);
}

std::size_t horizon_nodes(double horizon, double h) {
  if (!(h > 0.0)) throw DomainError("grid step must be positive");
  const double steps = horizon / h;
  const double rounded = std::round(steps);
  if (rounded < 1.0 || std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
    throw GridMismatch("horizon " + format_double(horizon) + " is not a multiple of the step " +
                       format_double(h));
  return static_cast<std::size_t>(rounded) + 1;
}

TriKernel volterra_resolvent(const ModelSpec& spec, double h) {
  validate_spec(spec);
  const std::size_t n = horizon_nodes(spec.horizon, h);
  const std::size_t p = spec.p;
  if (static_cast<double>(n) * static_cast<double>(n + 1) / 2 * static_cast<double>(p * p) > 2e8)
    throw RuntimeBudgetExceeded("resolvent triangle with " + std::to_string(n) +
                                " nodes is too large; use a coarser step");
  const MatrixSeq phi = sample_kernel(spec.kernel, h, n);
  const MatrixSeq g = sample_reproduction(spec, h, n);
  const std::size_t pp = p * p;

  // k(t_i, s_m) = G_i o Phi_{i-m}
  auto k_at = [&](std::size_t i, std::size_t m, double* out) {
    const double* gi = g[i];
    const double* ph = phi[i - m];
    for (std::size_t e = 0; e < pp; ++e) out[e] = gi[e] * ph[e];
  };

  TriKernel K(h, n, p);
  std::vector<double> acc;
  std::vector<double> kim(pp);
  std::vector<double> kij(pp);
  for (std::size_t i = 0; i < n; ++i) {
    k_at(i, i, kim.data());
    K(i, i) = Eigen::Map<const Eigen::MatrixXd>(kim.data(), static_cast<Index>(p), static_cast<Index>(p));
    if (i == 0) continue;
    const auto lu = implicit_step(K(i, i), h);
    // acc_j = sum_{m=j+1}^{i-1} k_im K_mj, accumulated row by row of K.
    acc.assign(i * pp, 0.0);
    for (std::size_t m = 1; m < i; ++m) {
      k_at(i, m, kim.data());
      const double* row = &K(m, 0)(0, 0);
      if (p == 1) {
        const double w = kim[0];
        if (w == 0.0) continue;
        double* a = acc.data();
        for (std::size_t j = 0; j < m; ++j) a[j] += w * row[j];
      } else {
        for (std::size_t j = 0; j < m; ++j) gemm_acc(&acc[j * pp], kim.data(), row + j * pp, p);
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      k_at(i, j, kij.data());
      Eigen::Map<Eigen::MatrixXd> a(&acc[j * pp], static_cast<Index>(p), static_cast<Index>(p));
      Eigen::Map<const Eigen::MatrixXd> kmat(kij.data(), static_cast<Index>(p), static_cast<Index>(p));
      const Eigen::MatrixXd rhs = kmat + h * (0.5 * kmat * K(j, j) + a);
      K(i, j) = lu.solve(rhs);
    }
  }

  // Spot-check the triangle equation K = k + k * K at spread-out entries.
  const double scale = std::max(1.0, K.max_abs());
  Eigen::MatrixXd sum(static_cast<Index>(p), static_cast<Index>(p));
  for (std::size_t i : check_nodes(n))
    for (std::size_t j : {std::size_t{0}, i / 3, i / 2, i}) {
      k_at(i, j, kij.data());
      Eigen::Map<const Eigen::MatrixXd> kmat(kij.data(), static_cast<Index>(p), static_cast<Index>(p));
      sum.setZero();
      if (i > j) {
        sum += 0.5 * kmat * K(j, j);
        for (std::size_t m = j + 1; m < i; ++m) {
          k_at(i, m, kim.data());
          sum += Eigen::Map<const Eigen::MatrixXd>(kim.data(), static_cast<Index>(p), static_cast<Index>(p)) *
                 K(m, j);
        }
        sum += 0.5 * K(i, i) * K(i, j);
      }
      const double residual = (K(i, j) - kmat - h * sum).cwiseAbs().maxCoeff();
      if (!(residual <= 1e-8 * scale))
        throw GridTooCoarse("Volterra resolvent residual " + format_double(residual) +
                            " exceeds 1e-8 at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  if (K.min_entry() < -1e-12 * scale)
    throw GridTooCoarse("Volterra resolvent has negative entries on this grid");
  return K;
}

double domination_excess(const TriKernel& k, const GridFunction& bound) {
  if (bound.step() != k.step() || bound.size() < k.size() || bound.rows() != k.dim() ||
      bound.cols() != k.dim())
    throw GridMismatch("domination bound lives on a different grid");
  double excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      excess = std::max(excess, (k(i, j) - bound[i - j]).maxCoeff());
  return excess;
}

namespace {

/// Solves x = f(t) + int_0^t k(t, s) x(s) ds on t_i = i h, i < n, where
/// k(t_i, s_j) = g(t_i / T) o phi(t_i - s_j) and f_i is a given p-vector.
std::vector<Eigen::VectorXd> solve_forced(const ModelSpec& spec, double h, std::size_t n,
                                          const std::vector<Eigen::VectorXd>& forcing) {
  const std::size_t p = spec.p;
  const MatrixSeq phi = sample_kernel(spec.kernel, h, n);
  const MatrixSeq g = sample_reproduction(spec, h, n);
  // x stored flat per component for the p = 1 fast path and locality.
  std::vector<std::vector<double>> x(p, std::vector<double>(n, 0.0));
  std::vector<Eigen::VectorXd> out(n, Eigen::VectorXd::Zero(static_cast<Index>(p)));
  Eigen::MatrixXd kii(static_cast<Index>(p), static_cast<Index>(p));
  Eigen::VectorXd rhs(static_cast<Index>(p));
  // Every diagonal term G_i o Phi_0 is dominated by sup g o Phi_0.
  implicit_step(reproduction_sup(spec).cwiseProduct(phi.mat(0)), h);

  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = g[i];
    rhs = forcing[i];
    if (i > 0) {
      // sum_l G_i(k,l) [1/2 Phi_i(k,l) x_0(l) + sum_{j=1}^{i-1} Phi_{i-j}(k,l) x_j(l)]
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l) {
          const double gkl = gi[k + l * p];
          if (gkl == 0.0) continue;
          const std::size_t e = k + l * p;
          const double* xl = x[l].data();
          double s = 0.5 * phi[i][e] * xl[0];
          if (p == 1) {
            const double* ph = phi.v.data();
            for (std::size_t j = 1; j < i; ++j) s += ph[i - j] * xl[j];
          } else {
            for (std::size_t j = 1; j < i; ++j) s += phi[i - j][e] * xl[j];
          }
          rhs(static_cast<Index>(k)) += h * gkl * s;
        }
      for (std::size_t e = 0; e < p * p; ++e) kii.data()[e] = gi[e] * phi[0][e];
      const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Index>(p), static_cast<Index>(p)) -
                                0.5 * h * kii;
      out[i] = a.partialPivLu().solve(rhs);
    } else {
      out[i] = rhs;
    }
    for (std::size_t k = 0; k < p; ++k) x[k][i] = out[i](static_cast<Index>(k));
  }
  return out;
}

MeanPath package(const std::vector<Eigen::VectorXd>& lambda, double h, std::size_t p) {
  const std::size_t n = lambda.size();
  MeanPath out{GridFunction(h, n, p, 1), GridFunction(h, n, p, 1)};
  Eigen::VectorXd cum = Eigen::VectorXd::Zero(static_cast<Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) cum += 0.5 * h * (lambda[i - 1] + lambda[i]);
    out.intensity[i] = lambda[i];
    out.count[i] = cum;
  }
  return out;
}

std::vector<Eigen::VectorXd> sample_curves(const std::vector<ScalarCurve>& curves, double horizon,
                                           double h, std::size_t n) {
  std::vector<Eigen::VectorXd> out(n, Eigen::VectorXd(static_cast<Index>(curves.size())));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::min(1.0, static_cast<double>(i) * h / horizon);
    for (std::size_t k = 0; k < curves.size(); ++k) out[i](static_cast<Index>(k)) = curves[k](x);
  }
  return out;
}

}  // namespace

MeanPath mean_intensity(const ModelSpec& spec, double h) {
  validate_spec(spec);
  const std::size_t n = horizon_nodes(spec.horizon, h);
  const auto mu = sample_curves(spec.baseline, spec.horizon, h, n);
  return package(solve_forced(spec, h, n, mu), h, spec.p);
}

MeanPath mean_intensity_from_resolvent(const ModelSpec& spec, const TriKernel& resolvent) {
  const double h = resolvent.step();
  const std::size_t n = resolvent.size();
  if (resolvent.dim() != spec.p) throw GridMismatch("resolvent dimension differs from the spec");
  if (horizon_nodes(spec.horizon, h) != n) throw GridMismatch("resolvent grid does not cover [0, T]");
  const auto mu = sample_curves(spec.baseline, spec.horizon, h, n);
  std::vector<Eigen::VectorXd> lambda(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Index>(spec.p));
    if (i > 0) {
      s += 0.5 * (resolvent(i, 0) * mu[0] + resolvent(i, i) * mu[i]);
      for (std::size_t j = 1; j < i; ++j) s += resolvent(i, j) * mu[j];
    }
    lambda[i] = mu[i] + h * s;
  }
  return package(lambda, h, spec.p);
}

Eigen::MatrixXd gamma(const ModelSpec& spec, double x) {
  const Eigen::MatrixXd a = stationary_response(spec, x);
  return a - Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

GammaCheck gamma_check(const ModelSpec& spec, double x, double h) {
  GammaCheck out;
  out.x = x;
  out.closed_form = gamma(spec, x);
  const Eigen::MatrixXd g0 = reproduction_at(spec, x);
  const Eigen::MatrixXd kx = branching_matrix_at(spec, x);
  const double rho = spectral_radius(kx);

  // Slowest exponential rate, longest compact support, and any power-law tail
  // among the coordinates that actually contribute.
  double beta_min = std::numeric_limits<double>::infinity();
  double support = 0.0;
  double powerlaw_tmax = 0.0;
  bool active = false;
  for (std::size_t k = 0; k < spec.p; ++k)
    for (std::size_t l = 0; l < spec.p; ++l) {
      if (kx(static_cast<Index>(k), static_cast<Index>(l)) == 0.0) continue;
      active = true;
      const Kernel& phi = spec.kernel(k, l);
      if (const auto* hist = std::get_if<Histogram>(&phi.form())) {
        support = std::max(support, hist->width * static_cast<double>(hist->heights.size()));
      } else if (const auto* pl = std::get_if<PowerLaw>(&phi.form())) {
        // Tail mass alpha (gamma / (t + gamma))^(beta - 1) below 1e-7 (1 - rho)^2.
        const double target = 1e-7 * (1.0 - rho) * (1.0 - rho) / std::max(pl->alpha, 1e-300);
        powerlaw_tmax = std::max(powerlaw_tmax, pl->gamma * (std::pow(target, -1.0 / (pl->beta - 1.0)) - 1.0));
      } else if (auto rate = phi.decay_rate()) {
        beta_min = std::min(beta_min, *rate);
      }
    }
  if (!active) {
    out.quadrature = Eigen::MatrixXd::Zero(out.closed_form.rows(), out.closed_form.cols());
    out.max_error = out.closed_form.cwiseAbs().maxCoeff();
    return out;
  }
  double tmax = 0.0;
  if (std::isfinite(beta_min)) tmax = std::max(tmax, 50.0 / (beta_min * (1.0 - rho)));
  if (support > 0.0) {
    const double cycles = rho > 0.0 ? std::log(1e-12 * (1.0 - rho)) / std::log(rho) : 1.0;
    tmax = std::max(tmax, support * std::max(1.0, cycles));
  }
  tmax = std::max(tmax, powerlaw_tmax);
  constexpr double kMaxNodes = 4e6;
  tmax = std::min(tmax, h * (kMaxNodes - 1));
  auto n = static_cast<std::size_t>(std::ceil(tmax / h)) + 1;
  if ((n - 1) % 2 == 1) ++n;
  out.truncation = h * static_cast<double>(n - 1);

  // Richardson extrapolation of the trapezoid error expansion in h^2, using
  // the same truncation point on a grid of step 2h.
  const GridFunction psi = conv_resolvent(spec.kernel, g0, h, n);
  out.quadrature = psi.integral();
  if (n >= 5 && (n - 1) % 2 == 0) {
    const GridFunction coarse = conv_resolvent(spec.kernel, g0, 2.0 * h, (n - 1) / 2 + 1);
    out.quadrature = (4.0 * out.quadrature - coarse.integral()) / 3.0;
  }
  if (std::isfinite(beta_min) && support == 0.0 && powerlaw_tmax == 0.0) {
    // Geometric tail: Psi decays like exp(-beta_min (1 - rho) t) beyond T_max.
    const Eigen::MatrixXd tail = psi[n - 1] / (beta_min * (1.0 - rho));
    out.tail_estimate = tail.cwiseAbs().maxCoeff();
    out.quadrature += tail;
  } else if (powerlaw_tmax > 0.0 && powerlaw_tmax > out.truncation) {
    out.tail_estimate = std::numeric_limits<double>::infinity();
  } else if (powerlaw_tmax > 0.0) {
    out.tail_estimate = 1e-7;
  } else {
    out.tail_estimate = 1e-12;
  }
  out.max_error = (out.quadrature - out.closed_form).cwiseAbs().maxCoeff();
  return out;
}

std::vector<CesaroPoint> cesaro_check(const ModelSpec& spec, const std::vector<ScalarCurve>& m,
                                      double u, std::span<const double> horizons, double h) {
  validate_spec(spec);
  if (m.size() != spec.p) throw DomainError("m must have p components");
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("u must lie in [0, 1]");
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (!(horizons[i] > horizons[i - 1])) throw DomainError("horizons must be strictly increasing");
  const auto P = static_cast<Index>(spec.p);

  // Right side: Gauss-Legendre on each cell of a 512-node grid over [0, u].
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(P);
  if (u > 0.0) {
    const auto& gl = gauss_legendre8();
    constexpr int kNodes = 512;
    const double cell = u / (kNodes - 1);
    Eigen::VectorXd mx(P);
    for (int c = 0; c + 1 < kNodes; ++c) {
      const double a = c * cell;
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double x = a + 0.5 * cell * (1.0 + gl.nodes[q]);
        for (Index k = 0; k < P; ++k) mx(k) = m[static_cast<std::size_t>(k)](x);
        rhs += 0.5 * cell * gl.weights[q] * (gamma(spec, x) * mx);
      }
    }
  }

  std::vector<CesaroPoint> out;
  for (double T : horizons) {
    CesaroPoint pt;
    pt.horizon = T;
    pt.rhs = rhs;
    pt.lhs = Eigen::VectorXd::Zero(P);
    if (u > 0.0) {
      ModelSpec sT = spec;
      sT.horizon = T;
      validate_spec(sT);
      // Step dividing T u exactly, no larger than h.
      const double end = T * u;
      const auto steps = static_cast<std::size_t>(std::ceil(end / h - 1e-9));
      const double hh = end / static_cast<double>(steps);
      const std::size_t n = steps + 1;
      const auto forcing = sample_curves(m, T, hh, n);
      const auto x = solve_forced(sT, hh, n, forcing);
      // z = x - m; (1/T) int_0^{Tu} z by trapezoid.
      for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        pt.lhs += w * (x[i] - forcing[i]);
      }
      pt.lhs *= hh / T;
    }
    pt.error = (pt.lhs - pt.rhs).cwiseAbs().maxCoeff();
    pt.error_sqrt_horizon = pt.error * std::sqrt(T);
    out.push_back(std::move(pt));
  }
  return out;
}

void write_csv(const GridFunction& f, std::ostream& out) {
  out << 't';
  for (std::size_t r = 0; r < f.rows(); ++r)
    for (std::size_t c = 0; c < f.cols(); ++c) out << ",v" << r + 1 << '_' << c + 1;
  out << '\n';
  for (std::size_t j = 0; j < f.size(); ++j) {
    out << format_double(f.t(j));
    const auto v = f[j];
    for (Index r = 0; r < v.rows(); ++r)
      for (Index c = 0; c < v.cols(); ++c) out << ',' << format_double(v(r, c));
    out << '\n';
  }
}

void write_csv(const TriKernel& k, std::ostream& out) {
  out << "t,s";
  for (std::size_t r = 0; r < k.dim(); ++r)
    for (std::size_t c = 0; c < k.dim(); ++c) out << ",k" << r + 1 << '_' << c + 1;
  out << '\n';
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      out << format_double(k.t(i)) << ',' << format_double(k.t(j));
      const auto v = k(i, j);
      for (Index r = 0; r < v.rows(); ++r)
        for (Index c = 0; c < v.cols(); ++c) out << ',' << format_double(v(r, c));
      out << '\n';
    }
}

}  // namespace hawkes_ls
