#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/limits.hpp"
#include "hawkes_ls/stats.hpp"

using namespace hawkes_ls;

namespace {

ModelSpec univariate(ScalarCurve g, ScalarCurve mu = ScalarCurve::constant(1.0)) {
  return ModelSpec::univariate(100.0, std::move(mu), std::move(g), Kernel(Exponential{1.0, 1.0}));
}

ModelSpec antidiagonal(double alpha, double m0) {
  KernelMatrix phi(2, Kernel::zero());
  phi(0, 1) = Kernel(Exponential{1.0, 1.0});
  phi(1, 0) = Kernel(Exponential{1.0, 1.0});
  return ModelSpec::with_scalar_g(100.0, {ScalarCurve::constant(m0), ScalarCurve::constant(m0)},
                                  ScalarCurve::constant(alpha), phi);
}

}  // namespace

TEST_SUITE("limits") {
  TEST_CASE("LLN curve for constant reproduction") {
    const auto c = lln_curve(univariate(ScalarCurve::constant(0.8)));
    CHECK(c.size() == kLimitNodes);
    CHECK(c.lln.front()(0) == 0.0);
    CHECK(c.lln.back()(0) == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(c.lln_at(0.3)(0) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(c.cov.empty());
  }

  TEST_CASE("LLN curve against closed forms") {
    // int_0^1 dx / (1 - 0.8 x) = ln 5 / 0.8.
    const auto lin = lln_curve(univariate(Linear{0.0, 0.8}));
    CHECK(lin.lln.back()(0) == doctest::Approx(2.011797390542625468).epsilon(1e-12));
    // mpmath quad of 1 / (1 - 0.8 exp(-10 (x - 0.5)^2)) on [0, 1].
    const auto bump = lln_curve(univariate(GaussianBump{0.8, 10.0, 0.5}));
    CHECK(bump.lln.back()(0) == doctest::Approx(2.29841677373045028).epsilon(1e-12));
    const auto none = lln_curve(univariate(ScalarCurve::constant(0.5), ScalarCurve::constant(0.0)));
    CHECK(none.lln.back()(0) == 0.0);
  }

  TEST_CASE("LLN curve is nondecreasing and its slope is the stationary rate") {
    const auto spec = univariate(GaussianBump{0.8, 10.0, 0.5});
    const auto c = lln_curve(spec);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c.lln[i](0) >= c.lln[i - 1](0));
    const double h = c.u[1];
    for (std::size_t i = 1; i + 1 < c.size(); i += 37) {
      const double slope = (c.lln[i + 1](0) - c.lln[i - 1](0)) / (2.0 * h);
      CHECK(slope == doctest::Approx(lln_rate_at(spec, c.u[i])(0)).epsilon(1e-4));
    }
  }

  TEST_CASE("doubling the grid changes L(1) by less than 1e-6") {
    const std::vector<ScalarCurve> gs = {
        ScalarCurve::constant(0.6), Linear{0.1, 0.8},        QuadraticDecay{0.5, 0.9},
        GaussianBump{0.8, 10.0, 0.5}, Table{{0.0, 0.3, 0.71, 1.0}, {0.2, 0.9, 0.1, 0.5}}};
    for (const auto& g : gs) CHECK(lln_refinement_change(univariate(g)) < 1e-6);
  }

  TEST_CASE("CLT covariance closed forms") {
    CHECK(clt_covariance(univariate(ScalarCurve::constant(0.5)), 1.0)(0, 0) ==
          doctest::Approx(8.0).epsilon(1e-13));
    CHECK(clt_covariance(univariate(ScalarCurve::constant(0.5)), 0.0)(0, 0) == 0.0);
    // mpmath quad of A^3 mu with A = 1 / (1 - g), g the Gaussian bump.
    CHECK(clt_covariance(univariate(GaussianBump{0.8, 10.0, 0.5}), 1.0)(0, 0) ==
          doctest::Approx(25.0034035521790723).epsilon(1e-11));

    const double a = 0.5;
    const double m0 = 1.3;
    const double u = 0.7;
    const Eigen::MatrixXd c = clt_covariance(antidiagonal(a, m0), u);
    const double scale = u * m0 / ((1 - a * a) * (1 - a * a) * (1 - a));
    CHECK(c(0, 0) == doctest::Approx(scale * (1 + a * a)).epsilon(1e-12));
    CHECK(c(1, 1) == doctest::Approx(scale * (1 + a * a)).epsilon(1e-12));
    CHECK(c(0, 1) == doctest::Approx(scale * 2 * a).epsilon(1e-12));
    CHECK(c(1, 0) == c(0, 1));
    CHECK_THROWS_AS(clt_covariance(antidiagonal(a, m0), 1.5), DomainError);
  }

  TEST_CASE("covariance path is PSD, Loewner-monotone and matches clt_covariance") {
    const auto spec = antidiagonal(0.5, 1.0);
    const auto c = limit_curve(spec, 65);
    for (std::size_t i = 1; i < c.size(); ++i) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> step(c.cov[i] - c.cov[i - 1]);
      CHECK(step.eigenvalues().minCoeff() >= -1e-12);
      Eigen::LLT<Eigen::MatrixXd> llt(c.cov[i] + 1e-12 * Eigen::MatrixXd::Identity(2, 2));
      CHECK(llt.info() == Eigen::Success);
    }
    CHECK((c.cov.back() - clt_covariance(spec, 1.0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(fluctuation_diag(spec, 0.3).diagonal().isApprox(lln_rate_at(spec, 0.3)));
  }

  TEST_CASE("limit path sampler") {
    SUBCASE("zero baseline gives the zero path") {
      const auto path =
          sample_limit_path(univariate(ScalarCurve::constant(0.5), ScalarCurve::constant(0.0)), 1, 50);
      for (const auto& x : path.x) CHECK(x(0) == 0.0);
    }
    SUBCASE("terminal variance matches the covariance") {
      const auto spec = univariate(ScalarCurve::constant(0.5));
      std::vector<double> ends;
      for (std::uint64_t r = 0; r < 10000; ++r)
        ends.push_back(sample_limit_path(spec, 42 + r, 20).x.back()(0));
      // Var of the sample variance of normals: 2 sigma^4 / (n - 1).
      const double se = std::sqrt(2.0 * 64.0 / 9999.0);
      CHECK(std::abs(stats::variance(ends) - 8.0) < 3.0 * se);
      CHECK(std::abs(stats::mean(ends)) < 4.0 * std::sqrt(8.0 / 10000.0));
    }
    SUBCASE("no excitation is time-changed Brownian motion") {
      const auto spec = univariate(ScalarCurve::constant(0.0), Linear{1.0, 2.0});
      std::vector<double> ends;
      for (std::uint64_t r = 0; r < 10000; ++r)
        ends.push_back(sample_limit_path(spec, 7 + r, 200).x.back()(0));
      // int_0^1 (1 + 2x) dx = 2, minus the left-point bias 1/200.
      const double se = std::sqrt(2.0 * 4.0 / 9999.0);
      CHECK(std::abs(stats::variance(ends) - 1.995) < 3.0 * se);
    }
    CHECK_THROWS_AS(sample_limit_path(univariate(ScalarCurve::constant(0.5)), 1, 0), DomainError);
  }

  TEST_CASE("CSV layout") {
    std::ostringstream out;
    write_csv(limit_curve(antidiagonal(0.5, 1.0), 3), out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "u,L_1,L_2,C_1_1,C_1_2,C_2_1,C_2_2");
    std::getline(in, line);
    CHECK(line == "0,0,0,0,0,0,0");
  }
}
