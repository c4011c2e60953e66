#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/limits.hpp"
#include "hawkes_ls/montecarlo.hpp"
#include "hawkes_ls/stats.hpp"

using namespace hawkes_ls;

namespace {

ModelSpec univariate(double T, ScalarCurve g, Kernel phi = Exponential{1.0, 1.0}) {
  return ModelSpec::univariate(T, ScalarCurve::constant(1.0), std::move(g), std::move(phi));
}

ModelSpec antidiagonal(double alpha, double T) {
  KernelMatrix phi(2, Kernel::zero());
  phi(0, 1) = Kernel(Exponential{1.0, 1.0});
  phi(1, 0) = Kernel(Exponential{1.0, 1.0});
  return ModelSpec::with_scalar_g(T, {ScalarCurve::constant(1.0), ScalarCurve::constant(1.0)},
                                  ScalarCurve::constant(alpha), phi);
}

McOptions options(std::size_t n, std::uint64_t seed, std::size_t u_nodes = 201) {
  McOptions o;
  o.replications = n;
  o.seed = seed;
  o.u_nodes = u_nodes;
  o.threads = 2;
  return o;
}

}  // namespace

TEST_SUITE("montecarlo") {
  TEST_CASE("smoke run on a Poisson process") {
    const auto spec = univariate(50.0, ScalarCurve::constant(0.0));
    const auto r = run_lln(spec, options(2, 42));
    CHECK(r.replications == 2);
    CHECK(r.u.size() == 201);
    CHECK(r.seeds.size() == 2);
    CHECK(r.mean_path.size() == 201);
    CHECK(r.mean_path.front()(0) == 0.0);
    CHECK(r.mean_path.back()(0) == doctest::Approx(1.0).epsilon(0.5));
    CHECK(r.lln.back()(0) == doctest::Approx(1.0));
    CHECK(!r.centering);
    CHECK_THROWS_AS(run_lln(spec, options(1, 42)), DomainError);
  }

  TEST_CASE("counts do not depend on the thread count") {
    const auto spec = univariate(100.0, GaussianBump{0.8, 10.0, 0.5});
    auto one = options(24, 9, 11);
    one.threads = 1;
    auto four = one;
    four.threads = 4;
    const auto a = replicate_counts(spec, one);
    const auto b = replicate_counts(spec, four);
    CHECK(a.counts == b.counts);
    CHECK(a.seeds == b.seeds);
    std::ostringstream ja, jb;
    ja << to_json(lln_report(spec, a));
    jb << to_json(lln_report(spec, b));
    CHECK(ja.str() == jb.str());
  }

  TEST_CASE("counts agree with the chosen generator") {
    const auto spec = univariate(40.0, ScalarCurve::constant(0.5));
    auto o = options(3, 5, 3);
    const auto thin = replicate_counts(spec, o);
    o.generator = Generator::ExpFast;
    const auto fast = replicate_counts(spec, o);
    for (std::size_t r = 0; r < 3; ++r) {
      CHECK(thin.counts(static_cast<Eigen::Index>(r), 2) ==
            static_cast<double>(simulate(spec, thin.seeds[r]).total()));
      CHECK(fast.counts(static_cast<Eigen::Index>(r), 2) ==
            static_cast<double>(simulate_exp_fast(spec, thin.seeds[r]).total()));
    }
  }

  TEST_CASE("Poisson fluctuations are standard at u = 1") {
    const auto spec = univariate(100.0, ScalarCurve::constant(0.0));
    const auto r = run_clt(spec, options(800, 42, 5), Centering::Expectation);
    const auto last = r.u.size() - 1;
    CHECK(r.center[last](0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.theory_cov[last](0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    // Normal-approximation chi-square band on the sample variance.
    CHECK(std::abs(r.empirical_cov[last](0, 0) - 1.0) < 4.0 * std::sqrt(2.0 / 799.0));
    CHECK(std::abs(r.z_mean[last](0)) < 4.0 * std::sqrt(1.0 / 800.0));
    CHECK(std::isnan(r.ks_pvalue[0](0)));
    CHECK(to_json(r)["ks_pvalue"][0][0].is_null());
  }

  TEST_CASE("antidiagonal fluctuations are correlated as predicted") {
    const auto spec = antidiagonal(0.5, 200.0);
    const auto r = run_clt(spec, options(1000, 42, 3), Centering::Expectation);
    const auto& c = r.empirical_cov.back();
    const double corr = c(0, 1) / std::sqrt(c(0, 0) * c(1, 1));
    CHECK(corr == doctest::Approx(0.8).epsilon(0.05 / 0.8));
  }

  TEST_CASE("the two centerings differ by a deterministic shift that shrinks with T") {
    double previous = 0.0;
    for (double T : {100.0, 400.0}) {
      const auto spec = univariate(T, GaussianBump{0.8, 10.0, 0.5});
      const auto sample = replicate_counts(spec, options(4, 3, 21));
      const auto expect = centering_path(spec, sample.u, Centering::Expectation);
      const auto lln = centering_path(spec, sample.u, Centering::Lln);
      const Eigen::MatrixXd diff =
          rescaled_fluctuations(sample, expect) - rescaled_fluctuations(sample, lln);
      double shift = 0.0;
      for (std::size_t j = 0; j < sample.u.size(); ++j) {
        const double s = std::sqrt(T) * (lln[j](0) - expect[j](0));
        CHECK(diff.col(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff() ==
              doctest::Approx(std::abs(s)).epsilon(1e-6));
        shift = std::max(shift, std::abs(s));
      }
      if (previous > 0.0) CHECK(shift < previous);
      previous = shift;
    }
  }

  TEST_CASE("expectation centering follows the mean intensity quadrature") {
    const auto spec = univariate(40.0, ScalarCurve::constant(0.5));
    const auto c = centering_path(spec, unit_grid(5), Centering::Expectation);
    // E N(t) = 2 t - 2 (1 - exp(-t / 2)) for alpha = 0.5, beta = 1; the
    // default step 0.05 leaves a trapezoid bias of order (beta h)^2 / 12.
    const double t = 40.0;
    CHECK(c.back()(0) * t == doctest::Approx(2 * t - 2 * (1 - std::exp(-t / 2))).epsilon(3e-4));
    const auto fine = centering_path(spec, unit_grid(5), Centering::Expectation, 0.01);
    CHECK(fine.back()(0) * t == doctest::Approx(2 * t - 2 * (1 - std::exp(-t / 2))).epsilon(2e-5));
  }

  TEST_CASE("LLN centering needs the regularity flags") {
    const auto heavy = univariate(50.0, ScalarCurve::constant(0.5), PowerLaw{1.0, 1.0, 1.4});
    CHECK_THROWS_AS(run_clt(heavy, options(2, 1), Centering::Lln), CenteringUnavailable);
    CHECK_THROWS_AS(parse_centering("median"), DomainError);
    CHECK(parse_centering("lln") == Centering::Lln);
  }

  TEST_CASE("CSV layouts") {
    const auto spec = univariate(20.0, ScalarCurve::constant(0.3));
    const auto r = run_clt(spec, options(3, 1, 3), Centering::Expectation);
    std::ostringstream table, plot;
    write_csv(r, table);
    write_plot_csv(r, plot);
    CHECK(table.str().substr(0, table.str().find('\n')) ==
          "u,mean_1,lln_1,se_1,center_1,var_1,theory_var_1,skewness_1,excess_kurtosis_1,ks_pvalue_1");
    CHECK(plot.str().substr(0, plot.str().find('\n')) == "u,empirical,theoretical");
    CHECK(r.node(0.49) == 1);
  }
}
