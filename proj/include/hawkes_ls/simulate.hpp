#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hawkes_ls/event_log.hpp"
#include "hawkes_ls/model.hpp"

namespace hawkes_ls {

struct SimulationOptions {
  /// Width of the bound-refresh window as a fraction of the horizon.
  double window_fraction = 1e-3;
  /// Height of one mark band of the Poisson base (thinning generator only).
  double band_height = 1.0;
  /// Upper limit on the number of accepted events.
  std::size_t max_events = 100'000'000;
  /// Past events whose envelope contribution to every component's intensity
  /// has fallen below this absolute level are dropped from the active set.
  double prune_level = 1e-14;
};

/// Exact simulation by thinning a Poisson base measure. Each component k owns a
/// unit-rate Poisson measure on (time, mark) space, materialized lazily in
/// cells (window w, mark band j) whose draws depend only on (seed, k, w, j); an
/// atom (t, m) becomes an event of k iff m < lambda_k(t-). Raising the baseline
/// pointwise can therefore only add events for the same seed.
///
/// Throws Unstable, RuntimeBudgetExceeded.
EventLog simulate(const ModelSpec& spec, std::uint64_t seed, const SimulationOptions& options = {});

/// Ogata thinning against the aggregate local bound, using the O(p^2)-per-step
/// recursion S_kl(t) = sum_j beta_kl e^{-beta_kl (t - s_j)} available when every
/// kernel coordinate is exponential. Throws NotExponential, Unstable,
/// RuntimeBudgetExceeded.
EventLog simulate_exp_fast(const ModelSpec& spec, std::uint64_t seed,
                           const SimulationOptions& options = {});

/// Left-limit intensity lambda_k(t-) at each grid point (events at exactly t do
/// not contribute), by direct summation. Result is indexed [k][i].
/// Throws GridOutOfRange, InvalidLog.
std::vector<std::vector<double>> intensity_path(const ModelSpec& spec, const EventLog& log,
                                                std::span<const double> grid);

struct ComponentResiduals {
  /// Lambda_k(t_i) - Lambda_k(t_{i-1}), t_0 = 0, one per event.
  std::vector<double> samples;
  double ks_statistic = 0.0;
  double ks_pvalue = 1.0;
  std::size_t events = 0;
};

struct ResidualReport {
  std::vector<ComponentResiduals> components;
  /// All components' samples tested together.
  ComponentResiduals pooled;
};

/// Time-rescaled inter-arrival times and their KS test against Exp(1).
/// Compensator increments are integrated piecewise between events (split at
/// kernel and table breakpoints) with adaptive Gauss-Legendre to 1e-10.
/// Throws InvalidLog, QuadratureFailure.
ResidualReport compensator_residuals(const ModelSpec& spec, const EventLog& log);

}  // namespace hawkes_ls
