#include "hawkes_ls/curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hawkes_ls/detail/overloaded.hpp"
#include "hawkes_ls/error.hpp"

namespace hawkes_ls {
namespace {

using detail::Overloaded;

bool all_finite(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

double table_eval(const Table& t, double x) {
  x = std::clamp(x, 0.0, 1.0);
  auto it = std::upper_bound(t.knots.begin(), t.knots.end(), x);
  if (it == t.knots.end()) return t.values.back();
  const auto i = static_cast<std::size_t>(it - t.knots.begin());
  if (i == 0) return t.values.front();
  const double x0 = t.knots[i - 1];
  const double x1 = t.knots[i];
  const double w = (x - x0) / (x1 - x0);
  return (1.0 - w) * t.values[i - 1] + w * t.values[i];
}

// Extremum over [lo, hi], taken among the only points where it can occur.
template <class F>
double extremum_on(const ScalarCurve::Form& form, double lo, double hi, F pick) {
  return std::visit(
      Overloaded{
          [&](const Constant& c) { return c.c; },
          [&](const Linear& l) { return pick(l.a + l.b * lo, l.a + l.b * hi); },
          [&](const QuadraticDecay& q) {
            // critical point at x = 0 is an endpoint of any subinterval of [0, 1]
            return pick(q.alpha0 * (1.0 - q.eta * lo * lo), q.alpha0 * (1.0 - q.eta * hi * hi));
          },
          [&](const GaussianBump& g) {
            auto f = [&](double x) { return g.a * std::exp(-g.c * (x - g.s) * (x - g.s)); };
            return pick(pick(f(lo), f(hi)), f(std::clamp(g.s, lo, hi)));
          },
          [&](const Table& t) {
            double best = pick(table_eval(t, lo), table_eval(t, hi));
            for (std::size_t i = 0; i < t.knots.size(); ++i) {
              if (t.knots[i] > lo && t.knots[i] < hi) best = pick(best, t.values[i]);
            }
            return best;
          },
      },
      form);
}

void check_form(const ScalarCurve::Form& form) {
  std::visit(Overloaded{
                 [](const Constant& c) {
                   if (!all_finite({c.c})) throw InvalidCurve("constant curve is not finite");
                 },
                 [](const Linear& l) {
                   if (!all_finite({l.a, l.b})) throw InvalidCurve("linear curve is not finite");
                 },
                 [](const QuadraticDecay& q) {
                   if (!all_finite({q.alpha0, q.eta}))
                     throw InvalidCurve("quadratic-decay curve is not finite");
                 },
                 [](const GaussianBump& g) {
                   if (!all_finite({g.a, g.c, g.s}))
                     throw InvalidCurve("gaussian-bump curve is not finite");
                 },
                 [](const Table& t) {
                   if (t.knots.size() < 2 || t.knots.size() != t.values.size())
                     throw InvalidCurve("table curve needs >= 2 knots with matching values");
                   if (t.knots.front() != 0.0 || t.knots.back() != 1.0)
                     throw InvalidCurve("table knots must span exactly [0, 1]");
                   for (std::size_t i = 0; i < t.knots.size(); ++i) {
                     if (!std::isfinite(t.knots[i]) || !std::isfinite(t.values[i]))
                       throw InvalidCurve("table curve is not finite");
                     if (i > 0 && !(t.knots[i] > t.knots[i - 1]))
                       throw InvalidCurve("table knots must be strictly increasing");
                   }
                 },
             },
             form);
}

}  // namespace

ScalarCurve::ScalarCurve(Form form) : form_(std::move(form)) {
  check_form(form_);
  const double lowest = inf();
  if (!(lowest >= 0.0)) {
    throw InvalidCurve("curve takes negative value " + std::to_string(lowest) + " on [0, 1]");
  }
  if (!std::isfinite(sup())) throw InvalidCurve("curve is unbounded on [0, 1]");
}

double ScalarCurve::operator()(double x) const {
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.c; },
                        [x](const Linear& l) { return l.a + l.b * x; },
                        [x](const QuadraticDecay& q) { return q.alpha0 * (1.0 - q.eta * x * x); },
                        [x](const GaussianBump& g) {
                          return g.a * std::exp(-g.c * (x - g.s) * (x - g.s));
                        },
                        [x](const Table& t) { return table_eval(t, x); },
                    },
                    form_);
}

double ScalarCurve::sup_on(double lo, double hi) const {
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, lo, 1.0);
  return extremum_on(form_, lo, hi, [](double a, double b) { return std::max(a, b); });
}

double ScalarCurve::inf() const {
  return extremum_on(form_, 0.0, 1.0, [](double a, double b) { return std::min(a, b); });
}

bool ScalarCurve::is_zero() const { return sup() == 0.0; }

bool ScalarCurve::is_constant() const {
  return std::visit(Overloaded{
                        [](const Constant&) { return true; },
                        [](const Linear& l) { return l.b == 0.0; },
                        [](const QuadraticDecay& q) { return q.eta == 0.0 || q.alpha0 == 0.0; },
                        [](const GaussianBump& g) { return g.c == 0.0 || g.a == 0.0; },
                        [](const Table& t) {
                          return std::all_of(t.values.begin(), t.values.end(),
                                             [&](double v) { return v == t.values.front(); });
                        },
                    },
                    form_);
}

}  // namespace hawkes_ls
