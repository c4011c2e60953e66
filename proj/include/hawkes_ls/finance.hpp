#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "hawkes_ls/model.hpp"
#include "hawkes_ls/montecarlo.hpp"

namespace hawkes_ls {

/// Bivariate bid/ask flow model: component 0 moves the price up, component 1
/// down, each excited only by the other, with reproduction rate
/// alpha(x) = alpha0 (1 - eta x^2). The directional flow delta_mu is folded
/// into the up baseline.
struct PriceModelParams {
  double mu0 = 1.0;
  double delta_mu = 0.5;
  double alpha0 = 0.5;
  double eta = 0.9;
  double beta = 1.0;
  double horizon = 200.0;
};

/// zeta0 = alpha0 eta / (1 + alpha0).
double zeta0(const PriceModelParams& params);

/// alpha(u) = alpha0 (1 - eta u^2).
double reproduction_rate(const PriceModelParams& params, double u);

/// mu = (mu0 + delta_mu, mu0), phi antidiagonal beta e^{-beta t}, g quadratic
/// decay. Throws DomainError (parameters out of range), Unstable (alpha0 >= 1).
ModelSpec build_price_spec(const PriceModelParams& params);

/// delta_mu int_0^u ds / (1 + alpha(s)) by composite Simpson on 10^4 intervals.
/// Throws DomainError (u outside [0, 1]).
double expected_return_limit(const PriceModelParams& params, double u);

/// Partial-fraction form of the same integral:
/// delta_mu atanh(sqrt(zeta0) u) / (sqrt(zeta0) (1 + alpha0)).
double expected_return_closed_form(const PriceModelParams& params, double u);

/// atanh(sqrt(zeta0) u) / (sqrt(zeta0) u), equal to 1 at zeta0 u^2 = 0.
/// Throws DomainError (u outside [0, 1] or sqrt(zeta0) u >= 1).
double slippage_ratio(const PriceModelParams& params, double u);

/// [int_0^u ds / ((1 + alpha0)(1 - zeta0 s^2))] / [u / (1 + alpha0)] by
/// Simpson on 10^4 intervals; the quadrature side of the slippage identity.
double slippage_ratio_quadrature(const PriceModelParams& params, double u);

/// sigma(u) = (mu+ + mu-) / ((1 - alpha(u)) (1 + alpha(u))^2).
double limit_volatility(const PriceModelParams& params, double u);

struct SlippageOptions {
  McOptions mc;
  std::size_t bootstrap = 1000;
  double confidence = 0.95;
};

/// Paired experiment: the decaying model and its eta = 0 twin simulated with
/// the same replication seeds.
struct SlippageReport {
  PriceModelParams params;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t bootstrap = 0;
  double confidence = 0.0;
  std::vector<double> u;
  std::vector<double> alpha;                // alpha(u)
  std::vector<double> empirical_return;     // mean P(Tu) / T with decay
  std::vector<double> empirical_return_flat;  // same for eta = 0
  std::vector<double> theoretical_return;   // expected_return_limit
  std::vector<double> empirical_ratio;      // NaN at u = 0
  std::vector<double> ratio_lo;             // percentile bootstrap interval
  std::vector<double> ratio_hi;
  std::vector<double> theoretical_ratio;    // slippage_ratio
  double wall_clock_seconds = 0.0;
};

/// Throws DomainError (delta_mu <= 0) and whatever the simulation throws.
SlippageReport mc_slippage(const PriceModelParams& params, const SlippageOptions& options);

/// Wall-clock time omitted; NaN becomes null.
nlohmann::json to_json(const SlippageReport& report);

/// The three plot tables: (u, alpha), (u, empirical_return, theoretical_return)
/// and (u, empirical_ratio, ratio_lo, ratio_hi, theoretical_ratio).
void write_alpha_csv(const SlippageReport& report, std::ostream& out);
void write_return_csv(const SlippageReport& report, std::ostream& out);
void write_slippage_csv(const SlippageReport& report, std::ostream& out);

}  // namespace hawkes_ls
