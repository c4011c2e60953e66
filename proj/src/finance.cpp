#include "hawkes_ls/finance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/rng.hpp"
#include "hawkes_ls/stats.hpp"
#include "hawkes_ls/text.hpp"

namespace hawkes_ls {

namespace {

constexpr std::uint64_t kBootstrapDomain = 0x424F4F5453545250ULL;
constexpr int kSimpsonIntervals = 10000;

template <class F>
double simpson(F&& f, double a, double b) {
  const double h = (b - a) / kSimpsonIntervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < kSimpsonIntervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

void check_u(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("u = " + format_double(u) + " outside [0, 1]");
}

/// atanh(x) / x with the series 1 + x^2/3 + x^4/5 + x^6/7 near 0.
double atanh_ratio(double x) {
  if (x < 1e-3) {
    const double x2 = x * x;
    return 1.0 + x2 * (1.0 / 3.0 + x2 * (1.0 / 5.0 + x2 / 7.0));
  }
  return std::atanh(x) / x;
}

}  // namespace

double zeta0(const PriceModelParams& params) {
  return params.alpha0 * params.eta / (1.0 + params.alpha0);
}

double reproduction_rate(const PriceModelParams& params, double u) {
  return params.alpha0 * (1.0 - params.eta * u * u);
}

ModelSpec build_price_spec(const PriceModelParams& params) {
  if (!(params.mu0 >= 0.0) || !(params.delta_mu >= 0.0))
    throw DomainError("baselines mu0 and delta_mu must be nonnegative");
  if (!(params.alpha0 >= 0.0)) throw DomainError("alpha0 must be nonnegative");
  if (!(params.eta >= 0.0 && params.eta < 1.0)) throw DomainError("eta must lie in [0, 1)");
  if (!(params.beta > 0.0)) throw DomainError("beta must be positive");
  if (!(params.horizon > 0.0)) throw DomainError("horizon must be positive");
  KernelMatrix phi(2, Kernel::zero());
  phi(0, 1) = Kernel(Exponential{1.0, params.beta});
  phi(1, 0) = Kernel(Exponential{1.0, params.beta});
  auto spec = ModelSpec::with_scalar_g(
      params.horizon,
      {ScalarCurve::constant(params.mu0 + params.delta_mu), ScalarCurve::constant(params.mu0)},
      QuadraticDecay{params.alpha0, params.eta}, std::move(phi));
  validate_spec(spec);
  return spec;
}

double expected_return_limit(const PriceModelParams& params, double u) {
  check_u(u);
  if (u == 0.0) return 0.0;
  return params.delta_mu *
         simpson([&](double s) { return 1.0 / (1.0 + reproduction_rate(params, s)); }, 0.0, u);
}

double expected_return_closed_form(const PriceModelParams& params, double u) {
  check_u(u);
  const double r = std::sqrt(zeta0(params));
  return params.delta_mu * u * atanh_ratio(r * u) / (1.0 + params.alpha0);
}

double slippage_ratio(const PriceModelParams& params, double u) {
  check_u(u);
  const double z = zeta0(params);
  if (!(z >= 0.0 && z < 1.0)) throw DomainError("zeta0 = " + format_double(z) + " outside [0, 1)");
  const double x = std::sqrt(z) * u;
  if (x >= 1.0) throw DomainError("sqrt(zeta0) u >= 1");
  return atanh_ratio(x);
}

double slippage_ratio_quadrature(const PriceModelParams& params, double u) {
  check_u(u);
  if (u == 0.0) return 1.0;
  const double a1 = 1.0 + params.alpha0;
  const double z = zeta0(params);
  const double num = simpson([&](double s) { return 1.0 / (a1 * (1.0 - z * s * s)); }, 0.0, u);
  return num / (u / a1);
}

double limit_volatility(const PriceModelParams& params, double u) {
  check_u(u);
  const double a = reproduction_rate(params, u);
  return (2.0 * params.mu0 + params.delta_mu) / ((1.0 - a) * (1.0 + a) * (1.0 + a));
}

SlippageReport mc_slippage(const PriceModelParams& params, const SlippageOptions& options) {
  if (!(params.delta_mu > 0.0)) throw DomainError("mc_slippage needs delta_mu > 0");
  if (options.bootstrap < 1) throw DomainError("bootstrap needs at least one resample");
  if (!(options.confidence > 0.0 && options.confidence < 1.0))
    throw DomainError("confidence must lie in (0, 1)");
  const auto start = std::chrono::steady_clock::now();
  PriceModelParams flat = params;
  flat.eta = 0.0;
  const auto decayed = replicate_counts(build_price_spec(params), options.mc);
  const auto twin = replicate_counts(build_price_spec(flat), options.mc);

  SlippageReport out;
  out.params = params;
  out.replications = decayed.replications();
  out.seed = options.mc.seed;
  out.bootstrap = options.bootstrap;
  out.confidence = options.confidence;
  out.u = decayed.u;
  const double T = params.horizon;
  const std::size_t n = out.replications;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // Bootstrap resamples are shared by every u-node, so the bands are paired too.
  std::vector<std::vector<std::uint32_t>> draws(options.bootstrap,
                                                std::vector<std::uint32_t>(n));
  for (std::size_t b = 0; b < options.bootstrap; ++b) {
    CounterStream rng(options.mc.seed ^ kBootstrapDomain, static_cast<std::uint32_t>(b));
    for (auto& d : draws[b])
      d = static_cast<std::uint32_t>(std::min<double>(rng.uniform() * static_cast<double>(n),
                                                      static_cast<double>(n - 1)));
  }

  for (std::size_t j = 0; j < out.u.size(); ++j) {
    const double u = out.u[j];
    const Eigen::VectorXd p1 = decayed.column(j, 0) - decayed.column(j, 1);
    const Eigen::VectorXd p0 = twin.column(j, 0) - twin.column(j, 1);
    out.alpha.push_back(reproduction_rate(params, u));
    out.empirical_return.push_back(p1.mean() / T);
    out.empirical_return_flat.push_back(p0.mean() / T);
    out.theoretical_return.push_back(expected_return_limit(params, u));
    out.theoretical_ratio.push_back(slippage_ratio(params, u));
    if (u == 0.0 || p0.sum() == 0.0) {
      out.empirical_ratio.push_back(nan);
      out.ratio_lo.push_back(nan);
      out.ratio_hi.push_back(nan);
      continue;
    }
    out.empirical_ratio.push_back(p1.sum() / p0.sum());
    std::vector<double> ratios;
    ratios.reserve(options.bootstrap);
    for (const auto& d : draws) {
      double s1 = 0.0;
      double s0 = 0.0;
      for (const auto i : d) {
        s1 += p1(i);
        s0 += p0(i);
      }
      if (s0 != 0.0) ratios.push_back(s1 / s0);
    }
    const double tail = 0.5 * (1.0 - options.confidence);
    out.ratio_lo.push_back(ratios.empty() ? nan : stats::quantile(ratios, tail));
    out.ratio_hi.push_back(ratios.empty() ? nan : stats::quantile(ratios, 1.0 - tail));
  }
  out.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace {

nlohmann::json numbers(const std::vector<double>& xs) {
  auto out = nlohmann::json::array();
  for (double x : xs) out.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json());
  return out;
}

std::string cell(double x) { return std::isfinite(x) ? format_double(x) : std::string("nan"); }

}  // namespace

nlohmann::json to_json(const SlippageReport& r) {
  nlohmann::json doc;
  doc["params"] = {{"mu0", r.params.mu0},       {"delta_mu", r.params.delta_mu},
                   {"alpha0", r.params.alpha0}, {"eta", r.params.eta},
                   {"beta", r.params.beta},     {"horizon", r.params.horizon}};
  doc["zeta0"] = zeta0(r.params);
  doc["replications"] = r.replications;
  doc["seed"] = r.seed;
  doc["bootstrap"] = r.bootstrap;
  doc["confidence"] = r.confidence;
  doc["u"] = r.u;
  doc["alpha"] = numbers(r.alpha);
  doc["empirical_return"] = numbers(r.empirical_return);
  doc["empirical_return_flat"] = numbers(r.empirical_return_flat);
  doc["theoretical_return"] = numbers(r.theoretical_return);
  doc["empirical_ratio"] = numbers(r.empirical_ratio);
  doc["ratio_lo"] = numbers(r.ratio_lo);
  doc["ratio_hi"] = numbers(r.ratio_hi);
  doc["theoretical_ratio"] = numbers(r.theoretical_ratio);
  return doc;
}

void write_alpha_csv(const SlippageReport& r, std::ostream& out) {
  out << "u,alpha\n";
  for (std::size_t j = 0; j < r.u.size(); ++j)
    out << format_double(r.u[j]) << ',' << cell(r.alpha[j]) << '\n';
}

void write_return_csv(const SlippageReport& r, std::ostream& out) {
  out << "u,empirical_return,theoretical_return\n";
  for (std::size_t j = 0; j < r.u.size(); ++j)
    out << format_double(r.u[j]) << ',' << cell(r.empirical_return[j]) << ','
        << cell(r.theoretical_return[j]) << '\n';
}

void write_slippage_csv(const SlippageReport& r, std::ostream& out) {
  out << "u,empirical_ratio,ratio_lo,ratio_hi,theoretical_ratio\n";
  for (std::size_t j = 0; j < r.u.size(); ++j)
    out << format_double(r.u[j]) << ',' << cell(r.empirical_ratio[j]) << ','
        << cell(r.ratio_lo[j]) << ',' << cell(r.ratio_hi[j]) << ','
        << cell(r.theoretical_ratio[j]) << '\n';
}

}  // namespace hawkes_ls
