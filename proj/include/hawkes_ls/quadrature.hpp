#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hawkes_ls/error.hpp"

namespace hawkes_ls {

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(std::size_t n);

  /// n-point rule on [a, b].
  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return half * sum;
  }
};

/// Shared 8-point rule used by the adaptive integrator and the limit curves.
const GaussLegendre& gauss_legendre8();

namespace detail {

template <class F>
double adaptive_gl(F& f, double a, double b, double whole, double tol, int depth, int& budget) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_legendre8().integrate(f, a, mid);
  const double right = gauss_legendre8().integrate(f, mid, b);
  const double refined = left + right;
  if (std::abs(refined - whole) <= tol) return refined;
  if (depth <= 0 || --budget <= 0)
    throw QuadratureFailure("adaptive Gauss-Legendre did not reach tolerance");
  // Halving stops at the rounding floor, otherwise endpoint singularities such
  // as t^0.5 would demand sub-ulp accuracy on tiny subintervals.
  const double child_tol = std::max(0.5 * tol, 1e-15 + 1e-14 * std::abs(refined));
  return adaptive_gl(f, a, mid, left, child_tol, depth - 1, budget) +
         adaptive_gl(f, mid, b, right, child_tol, depth - 1, budget);
}

}  // namespace detail

/// Adaptive 8-point Gauss-Legendre with interval bisection, absolute tolerance
/// `tol` on the whole integral. Throws QuadratureFailure.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
  if (b == a) return 0.0;
  int budget = 100000;
  const double whole = gauss_legendre8().integrate(f, a, b);
  return detail::adaptive_gl(f, a, b, whole, tol, max_depth, budget);
}

}  // namespace hawkes_ls
