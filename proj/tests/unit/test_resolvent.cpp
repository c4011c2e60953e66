#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/resolvent.hpp"

using namespace hawkes_ls;

namespace {

KernelMatrix exp_kernel(double alpha, double beta) { return KernelMatrix(1, Kernel(Exponential{alpha, beta})); }

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

ModelSpec fig1(ScalarCurve g, double T) {
  return ModelSpec::univariate(T, ScalarCurve::constant(1.0), std::move(g), Kernel(Exponential{1.0, 1.0}));
}

ModelSpec antidiagonal(double alpha, double T) {
  KernelMatrix phi(2, Kernel::zero());
  phi(0, 1) = Kernel(Exponential{1.0, 1.0});
  phi(1, 0) = Kernel(Exponential{1.0, 1.0});
  return ModelSpec::with_scalar_g(T, {ScalarCurve::constant(1.0), ScalarCurve::constant(1.0)},
                                  ScalarCurve::constant(alpha), phi);
}

}  // namespace

TEST_SUITE("resolvent") {
  TEST_CASE("star product of constants is exact") {
    const double c = 0.7;
    const auto a = TriKernel::sample(0.1, 30, 1, [&](double, double) { return scalar(c); });
    const auto prod = star_product(a, a);
    double worst = 0.0;
    for (std::size_t i = 0; i < 30; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        worst = std::max(worst, std::abs(prod(i, j)(0, 0) - c * c * (a.t(i) - a.t(j))));
    CHECK(worst < 1e-13);
    const auto zero = TriKernel::sample(0.1, 30, 1, [](double, double) { return scalar(0.0); });
    CHECK(star_product(a, zero).max_abs() == 0.0);
    const auto other = TriKernel::sample(0.2, 30, 1, [](double, double) { return scalar(1.0); });
    CHECK_THROWS_AS(star_product(a, other), GridMismatch);
  }

  TEST_CASE("star product preserves convolution structure") {
    const auto f = TriKernel::sample(0.05, 60, 2, [](double t, double s) {
      Eigen::MatrixXd m(2, 2);
      m << std::exp(-(t - s)), 0.3, (t - s), std::cos(t - s) + 1.0;
      return m;
    });
    const auto prod = star_product(f, f);
    double worst = 0.0;
    for (std::size_t d = 0; d < 60; ++d)
      for (std::size_t j = 1; j + d < 60; ++j)
        worst = std::max(worst, (prod(j + d, j) - prod(d, 0)).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-12);
  }

  TEST_CASE("exponential resolvent closed form") {
    // Laplace transform: alpha beta / (s + beta (1 - alpha)).
    const std::size_t n = 20001;
    const auto psi = conv_resolvent(exp_kernel(1.0, 1.0), scalar(0.5), 1e-3, n);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(psi[j](0, 0) - 0.5 * std::exp(-0.5 * psi.t(j))));
    CHECK(worst <= 1e-6);

    const auto fast = conv_resolvent(exp_kernel(0.6, 3.0), scalar(1.0), 1e-3, 5001);
    double worst_fast = 0.0;
    for (std::size_t j = 0; j < 5001; ++j)
      worst_fast = std::max(worst_fast, std::abs(fast[j](0, 0) - 1.8 * std::exp(-1.2 * fast.t(j))));
    CHECK(worst_fast <= 1e-5);

    CHECK(conv_resolvent(exp_kernel(1.0, 1.0), scalar(0.0), 1e-2, 100).max_abs() == 0.0);
  }

  TEST_CASE("integral of the resolvent is the geometric sum") {
    const auto psi = conv_resolvent(exp_kernel(1.0, 1.0), scalar(0.5), 0.01, 20001);
    CHECK(psi.integral()(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("forward solve agrees with the Neumann series") {
    KernelMatrix phi(2, Kernel::zero());
    phi(0, 0) = Kernel(GammaShape{0.3, 1.0, 2.0});
    phi(0, 1) = Kernel(Histogram{0.4, {0.5, 0.2, 0.6}});
    phi(1, 0) = Kernel(PowerLaw{0.4, 0.5, 2.5});
    phi(1, 1) = Kernel(Exponential{0.2, 1.5});
    Eigen::MatrixXd g0(2, 2);
    g0 << 0.9, 0.8, 0.7, 1.0;
    const auto a = conv_resolvent(phi, g0, 0.02, 801);
    const auto b = conv_resolvent_neumann(phi, g0, 0.02, 801);
    double worst = 0.0;
    for (std::size_t j = 0; j < 801; ++j) worst = std::max(worst, (a[j] - b[j]).cwiseAbs().maxCoeff());
    CHECK(worst <= 1e-8);

    const auto c = conv_resolvent(exp_kernel(1.0, 1.0), scalar(0.8), 0.01, 2001);
    const auto d = conv_resolvent_neumann(exp_kernel(1.0, 1.0), scalar(0.8), 0.01, 2001);
    double worst1 = 0.0;
    for (std::size_t j = 0; j < 2001; ++j) worst1 = std::max(worst1, std::abs(c[j](0, 0) - d[j](0, 0)));
    CHECK(worst1 <= 1e-8);
  }

  TEST_CASE("resolvent errors") {
    CHECK_THROWS_AS(conv_resolvent(exp_kernel(1.0, 1.0), scalar(1.0), 0.01, 10), Unstable);
    CHECK_THROWS_AS(conv_resolvent(exp_kernel(0.9, 100.0), scalar(1.0), 0.5, 10), GridTooCoarse);
    CHECK_THROWS_AS(horizon_nodes(10.0, 0.3), GridMismatch);
    CHECK(horizon_nodes(10.0, 0.05) == 201);
    CHECK_THROWS_AS(volterra_resolvent(fig1(ScalarCurve::constant(0.5), 10.0), 0.3), GridMismatch);
  }

  TEST_CASE("bounding resolvent") {
    const auto bump = fig1(GaussianBump{0.8, 10.0, 0.5}, 200.0);
    const auto psi = bounding_resolvent(bump, 0.01, 3001);
    double worst = 0.0;
    for (std::size_t j = 0; j < 3001; ++j)
      worst = std::max(worst, std::abs(psi[j](0, 0) - 0.8 * std::exp(-0.2 * psi.t(j))));
    CHECK(worst <= 1e-5);
    CHECK(bounding_resolvent(fig1(ScalarCurve::constant(0.0), 10.0), 0.01, 100).max_abs() == 0.0);
    const auto c = fig1(ScalarCurve::constant(0.4), 10.0);
    const auto a = bounding_resolvent(c, 0.01, 500);
    const auto b = conv_resolvent(c.kernel, scalar(0.4), 0.01, 500);
    CHECK((a[499] - b[499]).norm() == 0.0);
  }

  TEST_CASE("constant g reduces the Volterra resolvent to a convolution") {
    const auto spec = antidiagonal(0.6, 10.0);
    const auto K = volterra_resolvent(spec, 0.05);
    const auto psi = conv_resolvent(spec.kernel, Eigen::MatrixXd::Constant(2, 2, 0.6), 0.05, K.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < K.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) worst = std::max(worst, (K(i, j) - psi[i - j]).cwiseAbs().maxCoeff());
    CHECK(worst <= 1e-6);
    CHECK(volterra_resolvent(fig1(ScalarCurve::constant(0.0), 5.0), 0.05).max_abs() == 0.0);
  }

  TEST_CASE("the resolvent is dominated by the bounding resolvent") {
    for (const auto& g : {ScalarCurve(GaussianBump{0.8, 10.0, 0.5}), ScalarCurve(Linear{0.0, 0.8})}) {
      const auto spec = fig1(g, 20.0);
      const auto K = volterra_resolvent(spec, 0.05);
      const auto bar = bounding_resolvent(spec, 0.05, K.size());
      CHECK(K.min_entry() >= 0.0);
      CHECK(domination_excess(K, bar) <= 1e-12 * bar.max_abs());
    }
  }

  TEST_CASE("shrinking g never increases the resolvent") {
    const auto full = volterra_resolvent(fig1(GaussianBump{0.8, 10.0, 0.5}, 20.0), 0.05);
    const auto half = volterra_resolvent(fig1(GaussianBump{0.4, 10.0, 0.5}, 20.0), 0.05);
    double worst = -1.0;
    for (std::size_t i = 0; i < full.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) worst = std::max(worst, half(i, j)(0, 0) - full(i, j)(0, 0));
    CHECK(worst <= 0.0);
  }

  TEST_CASE("near-diagonal translation error scales like h / T") {
    // max |K(t + h, s + h) - K(t, s)| over lags below 5, at two horizons.
    auto shift_error = [](double T) {
      const auto K = volterra_resolvent(fig1(GaussianBump{0.8, 10.0, 0.5}, T), 0.05);
      double worst = 0.0;
      for (std::size_t i = 1; i < K.size(); ++i)
        for (std::size_t j = (i > 100 ? i - 100 : 1); j <= i; ++j)
          worst = std::max(worst, std::abs(K(i, j)(0, 0) - K(i - 1, j - 1)(0, 0)));
      return worst;
    };
    const double e20 = shift_error(20.0);
    const double e40 = shift_error(40.0);
    CHECK(e40 < e20);
    // Fitted constant: e(T) T / h stays bounded as T doubles.
    CHECK(e40 * 40.0 < 1.5 * e20 * 20.0);
  }

  TEST_CASE("mean intensity") {
    const auto poisson = ModelSpec::univariate(10.0, Linear{1.0, 2.0}, ScalarCurve::constant(0.0),
                                               Kernel(Exponential{1.0, 1.0}));
    const auto mp = mean_intensity(poisson, 0.01);
    CHECK(mp.intensity[500](0, 0) == doctest::Approx(2.0));
    CHECK(mp.count[1000](0, 0) == doctest::Approx(20.0));

    // Constant g = a: E lambda(t) = mu/(1-a) - mu a/(1-a) exp(-beta (1-a) t).
    const auto c = ModelSpec::univariate(40.0, ScalarCurve::constant(1.0), ScalarCurve::constant(0.5),
                                         Kernel(Exponential{1.0, 2.0}));
    const auto m = mean_intensity(c, 0.01);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.intensity.size(); ++i) {
      const double t = m.intensity.t(i);
      worst = std::max(worst, std::abs(m.intensity[i](0, 0) - (2.0 - std::exp(-t))));
    }
    // Trapezoid error is O((beta h)^2).
    CHECK(worst < 2e-4);
    CHECK(m.intensity[m.intensity.size() - 1](0, 0) == doctest::Approx(2.0).epsilon(1e-4));
    // E N(t) = 2 t - (1 - exp(-t)).
    CHECK(m.count.at(40.0)(0, 0) == doctest::Approx(80.0 - 1.0).epsilon(1e-4));
  }

  TEST_CASE("mean intensity agrees with the resolvent formula and respects its bound") {
    // Both routes are second order; their gap shrinks fourfold when h halves.
    auto gap = [](double h) {
      const auto spec = fig1(GaussianBump{0.8, 10.0, 0.5}, 30.0);
      const auto direct = mean_intensity(spec, h);
      const auto via = mean_intensity_from_resolvent(spec, volterra_resolvent(spec, h));
      double worst = 0.0;
      for (std::size_t i = 0; i < direct.intensity.size(); ++i) {
        worst = std::max(worst, std::abs(direct.intensity[i](0, 0) - via.intensity[i](0, 0)));
        // sup mu (1 - int phi_bar)^{-1} = 1 / (1 - 0.8).
        CHECK(direct.intensity[i](0, 0) <= 5.0);
      }
      return worst;
    };
    const double coarse = gap(0.1);
    const double fine = gap(0.05);
    CHECK(fine < 5e-3);
    CHECK(fine / coarse == doctest::Approx(0.25).epsilon(0.1));
  }

  TEST_CASE("gamma closed form") {
    CHECK(gamma(fig1(ScalarCurve::constant(0.5), 1.0), 0.3)(0, 0) == doctest::Approx(1.0));
    CHECK(gamma(fig1(Linear{0.0, 0.8}, 1.0), 0.0)(0, 0) == 0.0);
    const double a = 0.6;
    const Eigen::MatrixXd g = gamma(antidiagonal(a, 1.0), 0.5);
    const double c = 1.0 / (1.0 - a * a);
    CHECK(g(0, 0) == doctest::Approx(c * a * a));
    CHECK(g(0, 1) == doctest::Approx(c * a));
    CHECK(g(1, 0) == doctest::Approx(c * a));
    CHECK(g(1, 1) == doctest::Approx(c * a * a));
  }

  TEST_CASE("gamma quadrature matches the closed form") {
    const auto spec = fig1(GaussianBump{0.8, 10.0, 0.5}, 200.0);
    for (double x : {0.0, 0.3, 0.5, 0.9}) CHECK(gamma_check(spec, x, 0.02).max_error <= 1e-4);
    const auto anti = antidiagonal(0.5, 10.0);
    CHECK(gamma_check(anti, 0.5, 0.02).max_error <= 1e-4);
    const auto hist = ModelSpec::univariate(10.0, ScalarCurve::constant(1.0), ScalarCurve::constant(0.5),
                                            Kernel(Histogram{0.5, {0.8, 0.4, 0.2}}));
    CHECK(gamma_check(hist, 0.5, 0.01).max_error <= 1e-4);
  }

  TEST_CASE("Cesaro functional") {
    const auto constant = fig1(ScalarCurve::constant(0.5), 1.0);
    const std::vector<double> Ts = {50.0, 400.0};
    const std::vector<ScalarCurve> one = {ScalarCurve::constant(1.0)};
    const auto c = cesaro_check(constant, one, 1.0, Ts, 0.02);
    CHECK(c[0].rhs(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c[1].error < c[0].error);
    // Convolutive case: only the start-up transient is missed, so e(T) ~ 1/T.
    CHECK(c[1].error * 400.0 == doctest::Approx(c[0].error * 50.0).epsilon(0.05));
    const auto zero = cesaro_check(constant, one, 0.0, Ts, 0.02);
    CHECK(zero[0].lhs(0) == 0.0);
    CHECK(zero[0].rhs(0) == 0.0);
    const std::vector<double> bad = {100.0, 50.0};
    CHECK_THROWS_AS(cesaro_check(constant, one, 1.0, bad, 0.02), DomainError);
  }

  TEST_CASE("CSV export") {
    GridFunction f(0.5, 2, 1, 2);
    f[1](0, 1) = 3.25;
    std::ostringstream out;
    write_csv(f, out);
    CHECK(out.str() == "t,v1_1,v1_2\n0,0,0\n0.5,0,3.25\n");
    TriKernel k(1.0, 2, 1);
    k(1, 0)(0, 0) = 2.0;
    std::ostringstream tk;
    write_csv(k, tk);
    CHECK(tk.str() == "t,s,k1_1\n0,0,0\n1,0,2\n1,1,0\n");
  }
}
