#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "hawkes_ls/curve.hpp"
#include "hawkes_ls/kernel.hpp"
#include "hawkes_ls/pair_matrix.hpp"

namespace hawkes_ls {

/// A locally stationary Hawkes model on [0, T]:
///
///   lambda_k(t) = mu_k(t/T) + sum_l int_[0,t) g_kl(t/T) phi_kl(t - s) dN_l(s).
///
/// The reproduction function is stored as a p x p matrix of curves; a scalar g
/// is the broadcast of one curve (`scalar_reproduction` remembers which form
/// the spec was written in, for serialization).
struct ModelSpec {
  std::size_t p = 1;
  double horizon = 1.0;
  std::vector<ScalarCurve> baseline;
  PairMatrix<ScalarCurve> reproduction;
  bool scalar_reproduction = true;
  KernelMatrix kernel;

  /// Scalar reproduction function broadcast to every pair.
  static ModelSpec with_scalar_g(double horizon, std::vector<ScalarCurve> baseline,
                                 ScalarCurve g, KernelMatrix kernel);
  static ModelSpec with_matrix_g(double horizon, std::vector<ScalarCurve> baseline,
                                 PairMatrix<ScalarCurve> g, KernelMatrix kernel);

  /// One-component model.
  static ModelSpec univariate(double horizon, ScalarCurve mu, ScalarCurve g, Kernel phi);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct StabilitySummary {
  /// B_kl = sup_x g_kl(x) * int phi_kl.
  Eigen::MatrixXd branching_bound;
  double spectral_radius = 0.0;
  bool phi_l1_plus_eps = true;
  bool phi_sqrt_integrable = true;
  bool mu_lipschitz = true;
  bool g_differentiable = true;

  bool stable() const { return spectral_radius < 1.0; }
  /// Centering by the LLN limit needs Lipschitz mu and sqrt-integrable phi.
  bool lln_centering_available() const { return mu_lipschitz && phi_sqrt_integrable; }
};

/// Spectral radius of a nonnegative square matrix. Collatz-Wielandt bracketing
/// on the shifted matrix B + I (primitive spectrum) down to relative width 1e-12,
/// with a dense eigensolve fallback for p <= 8.
double spectral_radius(const Eigen::MatrixXd& nonneg);

/// Structural checks plus the stability summary. Does not reject unstable specs.
StabilitySummary stability_summary(const ModelSpec& spec);

/// stability_summary, throwing Unstable when rho(B) >= 1.
StabilitySummary validate_spec(const ModelSpec& spec);

Eigen::VectorXd baseline_at(const ModelSpec& spec, double x);
Eigen::MatrixXd reproduction_at(const ModelSpec& spec, double x);
/// Coordinatewise sup over [0, 1] of g.
Eigen::MatrixXd reproduction_sup(const ModelSpec& spec);

/// K(x) = g(x) o int phi (coordinatewise).
Eigen::MatrixXd branching_matrix_at(const ModelSpec& spec, double x);

/// Solution v of (Id - K(x)) v = mu(x). Throws SingularMatrix.
Eigen::VectorXd lln_rate_at(const ModelSpec& spec, double x);

/// (Id - K(x))^{-1}. Throws SingularMatrix.
Eigen::MatrixXd stationary_response(const ModelSpec& spec, double x);

}  // namespace hawkes_ls
