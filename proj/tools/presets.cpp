#include "presets.hpp"

#include "hawkes_ls/error.hpp"

namespace hawkes_ls::cli {

namespace {

Preset fig1(std::string name, std::string what, ScalarCurve g) {
  Preset p;
  p.name = std::move(name);
  p.description = "Univariate LLN experiment, " + std::move(what) +
                  " reproduction function, mu = 1, phi(t) = exp(-t), T = 200, n = 500";
  p.spec = ModelSpec::univariate(200.0, ScalarCurve::constant(1.0), std::move(g),
                                 Exponential{1.0, 1.0});
  p.replications = 500;
  p.stated = {"baseline", "reproduction", "kernel", "horizon", "replications"};
  return p;
}

Preset fig2(std::string name, double eta) {
  Preset p;
  p.name = std::move(name);
  PriceModelParams params;
  params.mu0 = 1.0;
  params.delta_mu = 0.5;
  params.alpha0 = 0.5;
  params.eta = eta;
  params.beta = 1.0;
  params.horizon = 200.0;
  p.description = "Bivariate price model with quadratic liquidity decay, eta = " +
                  std::to_string(eta).substr(0, 4) + ", n = 3000";
  p.spec = build_price_spec(params);
  p.price = params;
  p.replications = 3000;
  p.stated = {"replications", "reproduction form alpha0 (1 - eta x^2)", "antidiagonal kernel"};
  p.artifact_choices = {"mu0", "delta_mu", "alpha0", "eta", "beta", "horizon"};
  return p;
}

std::vector<Preset> build() {
  std::vector<Preset> out;
  out.push_back(fig1("fig1-gaussian", "Gaussian", GaussianBump{0.8, 10.0, 0.5}));
  out.push_back(fig1("fig1-linear", "linear", Linear{0.0, 0.8}));
  out.push_back(fig2("fig2-eta0", 0.0));
  out.push_back(fig2("fig2-eta045", 0.45));
  out.push_back(fig2("fig2-eta09", 0.9));

  Preset uni;
  uni.name = "clt-univariate";
  uni.description = "Constant reproduction 0.5, mu = 1, phi(t) = exp(-t), T = 500, n = 2000";
  uni.spec = ModelSpec::univariate(500.0, ScalarCurve::constant(1.0), ScalarCurve::constant(0.5),
                                   Exponential{1.0, 1.0});
  uni.replications = 2000;
  out.push_back(std::move(uni));

  Preset anti;
  anti.name = "clt-antidiagonal";
  anti.description = "Bivariate antidiagonal, reproduction 0.5, mu = (1, 1), T = 200, n = 2000";
  KernelMatrix phi(2, Kernel::zero());
  phi(0, 1) = Kernel(Exponential{1.0, 1.0});
  phi(1, 0) = Kernel(Exponential{1.0, 1.0});
  anti.spec = ModelSpec::with_scalar_g(200.0, {ScalarCurve::constant(1.0), ScalarCurve::constant(1.0)},
                                       ScalarCurve::constant(0.5), std::move(phi));
  anti.replications = 2000;
  out.push_back(std::move(anti));
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw DomainError("unknown preset \"" + name + "\" (known: " + known + ")");
}

}  // namespace hawkes_ls::cli
