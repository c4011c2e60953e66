#pragma once

#include <optional>
#include <concepts>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hawkes_ls/pair_matrix.hpp"

namespace hawkes_ls {

/// phi(t) = alpha beta exp(-beta t); integrates to alpha.
struct Exponential {
  double alpha = 0.0;
  double beta = 1.0;

  bool operator==(const Exponential&) const = default;
};

/// phi(t) = alpha (beta - 1) gamma^(beta - 1) (t + gamma)^(-beta); integrates to alpha.
struct PowerLaw {
  double alpha = 0.0;
  double gamma = 1.0;
  double beta = 2.0;

  bool operator==(const PowerLaw&) const = default;
};

/// phi(t) = alpha beta^(gamma + 1) / Gamma(gamma + 1) t^gamma exp(-beta t); integrates to alpha.
struct GammaShape {
  double alpha = 0.0;
  double gamma = 0.0;
  double beta = 1.0;

  bool operator==(const GammaShape&) const = default;
};

/// phi(t) = heights[i] on [i width, (i + 1) width), zero past the last bin.
struct Histogram {
  double width = 1.0;
  std::vector<double> heights;

  bool operator==(const Histogram&) const = default;
};

class Kernel {
 public:
  using Form = std::variant<Exponential, PowerLaw, GammaShape, Histogram>;

  /// Throws InvalidKernel on parameters outside the family's domain.
  Kernel(Form form);  // NOLINT(google-explicit-constructor)
  /// Direct conversion from one alternative, e.g. `Kernel k = Exponential{0.5, 1.0};`.
  template <class T>
    requires(!std::same_as<std::remove_cvref_t<T>, Form> &&
             !std::same_as<std::remove_cvref_t<T>, Kernel> && std::is_constructible_v<Form, T>)
  Kernel(T&& alt)  // NOLINT(google-explicit-constructor)
      : Kernel(Form(std::forward<T>(alt))) {}
  Kernel() : Kernel(Exponential{0.0, 1.0}) {}

  static Kernel zero() { return Kernel(Exponential{0.0, 1.0}); }

  /// Zero for t < 0.
  double operator()(double t) const;
  /// Closed-form integral over [0, inf).
  double integral() const;
  /// Nonincreasing majorant of phi on [0, inf).
  double envelope(double t) const;

  /// phi in L^(1+eps) for some eps > 0. Every built-in family is bounded.
  bool l1_plus_eps() const { return true; }
  /// int_0^inf phi(s) sqrt(s) ds < inf.
  bool sqrt_integrable() const;

  /// Rate of exponential decay of the tail, if any; +inf for compactly supported kernels.
  std::optional<double> decay_rate() const;

  bool is_zero() const { return integral() == 0.0; }
  const Exponential* as_exponential() const { return std::get_if<Exponential>(&form_); }
  const Form& form() const noexcept { return form_; }

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  Form form_;
  double scale_ = 0.0;  // family-specific normalizing constant
  double peak_ = 0.0;   // envelope value before the mode (GammaShape)
  double mode_ = 0.0;
  std::vector<double> suffix_max_;  // Histogram envelope
};

using KernelMatrix = PairMatrix<Kernel>;

/// Coordinatewise int_0^inf phi_kl.
Eigen::MatrixXd kernel_integral(const KernelMatrix& phi);

/// Coordinatewise envelope at t.
Eigen::MatrixXd kernel_envelope(const KernelMatrix& phi, double t);

/// Coordinatewise values at t.
Eigen::MatrixXd kernel_values(const KernelMatrix& phi, double t);

bool all_exponential(const KernelMatrix& phi);

}  // namespace hawkes_ls
