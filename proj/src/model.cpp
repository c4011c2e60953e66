#include "hawkes_ls/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "hawkes_ls/error.hpp"

namespace hawkes_ls {

ModelSpec ModelSpec::with_scalar_g(double horizon, std::vector<ScalarCurve> baseline,
                                   ScalarCurve g, KernelMatrix kernel) {
  ModelSpec spec;
  spec.p = baseline.size();
  spec.horizon = horizon;
  spec.reproduction = PairMatrix<ScalarCurve>(spec.p, std::move(g));
  spec.baseline = std::move(baseline);
  spec.scalar_reproduction = true;
  spec.kernel = std::move(kernel);
  return spec;
}

ModelSpec ModelSpec::with_matrix_g(double horizon, std::vector<ScalarCurve> baseline,
                                   PairMatrix<ScalarCurve> g, KernelMatrix kernel) {
  ModelSpec spec;
  spec.p = baseline.size();
  spec.horizon = horizon;
  spec.baseline = std::move(baseline);
  spec.reproduction = std::move(g);
  spec.scalar_reproduction = false;
  spec.kernel = std::move(kernel);
  return spec;
}

ModelSpec ModelSpec::univariate(double horizon, ScalarCurve mu, ScalarCurve g, Kernel phi) {
  return with_scalar_g(horizon, {std::move(mu)}, std::move(g), KernelMatrix(1, std::move(phi)));
}

double spectral_radius(const Eigen::MatrixXd& b) {
  const Eigen::Index p = b.rows();
  if (p == 0) return 0.0;
  if ((b.array() < 0.0).any()) throw DomainError("spectral_radius expects a nonnegative matrix");

  // For B >= 0, every eigenvalue z != rho of B satisfies |z + 1| < rho + 1, and for
  // any x > 0 the Collatz-Wielandt quotients of (B + I) bracket rho + 1.
  const Eigen::MatrixXd shifted = b + Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(p);
  double lo = 0.0;
  double hi = 0.0;
  constexpr int kMaxIter = 20000;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd y = shifted * x;
    const Eigen::ArrayXd ratio = y.array() / x.array();
    lo = ratio.minCoeff();
    hi = ratio.maxCoeff();
    if (hi - lo <= 1e-12 * hi) return std::max(0.0, 0.5 * (lo + hi) - 1.0);
    x = y / y.maxCoeff();
  }
  if (p <= 8) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(b, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  return std::max(0.0, 0.5 * (lo + hi) - 1.0);
}

StabilitySummary stability_summary(const ModelSpec& spec) {
  if (spec.p == 0) throw InvalidSpec("model needs at least one component");
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon))
    throw InvalidSpec("horizon must be finite and > 0");
  if (spec.baseline.size() != spec.p || spec.reproduction.dim() != spec.p ||
      spec.kernel.dim() != spec.p)
    throw InvalidSpec("baseline, reproduction and kernel dimensions must all equal p = " +
                      std::to_string(spec.p));

  StabilitySummary out;
  const auto p = static_cast<Eigen::Index>(spec.p);
  out.branching_bound = reproduction_sup(spec).cwiseProduct(kernel_integral(spec.kernel));
  out.spectral_radius = spectral_radius(out.branching_bound);
  for (Eigen::Index k = 0; k < p; ++k) {
    out.mu_lipschitz = out.mu_lipschitz && spec.baseline[k].lipschitz();
    for (Eigen::Index l = 0; l < p; ++l) {
      const Kernel& phi = spec.kernel(k, l);
      out.phi_l1_plus_eps = out.phi_l1_plus_eps && phi.l1_plus_eps();
      out.phi_sqrt_integrable = out.phi_sqrt_integrable && phi.sqrt_integrable();
      out.g_differentiable = out.g_differentiable && spec.reproduction(k, l).differentiable();
    }
  }
  return out;
}

StabilitySummary validate_spec(const ModelSpec& spec) {
  auto summary = stability_summary(spec);
  if (!summary.stable()) throw Unstable(summary.spectral_radius);
  return summary;
}

Eigen::VectorXd baseline_at(const ModelSpec& spec, double x) {
  Eigen::VectorXd mu(static_cast<Eigen::Index>(spec.p));
  for (std::size_t k = 0; k < spec.p; ++k) mu(static_cast<Eigen::Index>(k)) = spec.baseline[k](x);
  return mu;
}

Eigen::MatrixXd reproduction_at(const ModelSpec& spec, double x) {
  const auto p = static_cast<Eigen::Index>(spec.p);
  Eigen::MatrixXd g(p, p);
  for (Eigen::Index k = 0; k < p; ++k)
    for (Eigen::Index l = 0; l < p; ++l) g(k, l) = spec.reproduction(k, l)(x);
  return g;
}

Eigen::MatrixXd reproduction_sup(const ModelSpec& spec) {
  const auto p = static_cast<Eigen::Index>(spec.p);
  Eigen::MatrixXd g(p, p);
  for (Eigen::Index k = 0; k < p; ++k)
    for (Eigen::Index l = 0; l < p; ++l) g(k, l) = spec.reproduction(k, l).sup();
  return g;
}

Eigen::MatrixXd branching_matrix_at(const ModelSpec& spec, double x) {
  return reproduction_at(spec, x).cwiseProduct(kernel_integral(spec.kernel));
}

Eigen::MatrixXd stationary_response(const ModelSpec& spec, double x) {
  const auto p = static_cast<Eigen::Index>(spec.p);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p, p) - branching_matrix_at(spec, x);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible() || lu.rcond() < 1e-14)
    throw SingularMatrix("Id - K(x) is numerically singular at x = " + std::to_string(x));
  return lu.inverse();
}

Eigen::VectorXd lln_rate_at(const ModelSpec& spec, double x) {
  const auto p = static_cast<Eigen::Index>(spec.p);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p, p) - branching_matrix_at(spec, x);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible() || lu.rcond() < 1e-14)
    throw SingularMatrix("Id - K(x) is numerically singular at x = " + std::to_string(x));
  return lu.solve(baseline_at(spec, x));
}

}  // namespace hawkes_ls
