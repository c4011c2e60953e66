#pragma once

#include <concepts>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace hawkes_ls {

// Closed-form and tabulated functions of normalized time x in [0, 1]. Used for
// every coordinate of the baseline mu and the reproduction function g.

struct Constant {
  double c = 0.0;

  bool operator==(const Constant&) const = default;
};

/// x -> a + b x
struct Linear {
  double a = 0.0;
  double b = 0.0;

  bool operator==(const Linear&) const = default;
};

/// x -> alpha0 (1 - eta x^2)
struct QuadraticDecay {
  double alpha0 = 0.0;
  double eta = 0.0;

  bool operator==(const QuadraticDecay&) const = default;
};

/// x -> a exp(-c (x - s)^2)
struct GaussianBump {
  double a = 0.0;
  double c = 0.0;
  double s = 0.0;

  bool operator==(const GaussianBump&) const = default;
};

/// Piecewise-linear interpolation through (knots[i], values[i]). Knots are
/// strictly increasing, start at 0 and end at 1.
struct Table {
  std::vector<double> knots;
  std::vector<double> values;

  bool operator==(const Table&) const = default;
};

class ScalarCurve {
 public:
  using Form = std::variant<Constant, Linear, QuadraticDecay, GaussianBump, Table>;

  /// Throws InvalidCurve when the curve is non-finite or negative somewhere on [0, 1].
  ScalarCurve(Form form);  // NOLINT(google-explicit-constructor)
  /// Direct conversion from one alternative, e.g. `ScalarCurve c = Constant{1.0};`.
  template <class T>
    requires(!std::same_as<std::remove_cvref_t<T>, Form> &&
             !std::same_as<std::remove_cvref_t<T>, ScalarCurve> && std::is_constructible_v<Form, T>)
  ScalarCurve(T&& alt)  // NOLINT(google-explicit-constructor)
      : ScalarCurve(Form(std::forward<T>(alt))) {}
  ScalarCurve() : ScalarCurve(Constant{0.0}) {}

  static ScalarCurve constant(double c) { return ScalarCurve(Constant{c}); }

  double operator()(double x) const;

  /// Exact supremum over [0, 1].
  double sup() const { return sup_on(0.0, 1.0); }
  /// Exact supremum over [lo, hi] (clipped to [0, 1]); for Table, the max over
  /// interpolated endpoints and interior knots.
  double sup_on(double lo, double hi) const;
  /// Exact infimum over [0, 1].
  double inf() const;

  bool differentiable() const { return !std::holds_alternative<Table>(form_); }
  bool lipschitz() const { return true; }
  bool is_zero() const;
  bool is_constant() const;

  const Form& form() const noexcept { return form_; }

  friend bool operator==(const ScalarCurve&, const ScalarCurve&) = default;

 private:
  Form form_;
};

}  // namespace hawkes_ls
