#include "hawkes_ls/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <variant>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/quadrature.hpp"
#include "hawkes_ls/rng.hpp"
#include "hawkes_ls/spec_io.hpp"
#include "hawkes_ls/stats.hpp"

namespace hawkes_ls {

namespace {

// Seed perturbations keeping the two generators' streams apart.
constexpr std::uint64_t kThinningDomain = 0x7468696e6e696e67ULL;
constexpr std::uint64_t kExpFastDomain = 0x6578702d66617374ULL;

void check_options(const SimulationOptions& o) {
  if (!(o.window_fraction > 0.0 && o.window_fraction <= 1.0))
    throw InvalidSpec("simulation window fraction must lie in (0, 1]");
  if (!(o.band_height > 0.0) || !std::isfinite(o.band_height))
    throw InvalidSpec("simulation band height must be positive");
  if (!(o.prune_level >= 0.0)) throw InvalidSpec("pruning level must be nonnegative");
}

/// Partition of [0, T] into equal refresh windows.
struct Windows {
  std::size_t count;
  double width;
  double horizon;

  Windows(double horizon, double fraction)
      : count(static_cast<std::size_t>(std::ceil(1.0 / fraction - 1e-9))),
        width(horizon / static_cast<double>(count)),
        horizon(horizon) {}

  double start(std::size_t w) const { return static_cast<double>(w) * width; }
  double end(std::size_t w) const {
    return w + 1 == count ? horizon : static_cast<double>(w + 1) * width;
  }
};

/// Sup of mu_k and g_kl over one window, in real time.
struct WindowSups {
  std::vector<double> mu;
  Eigen::MatrixXd g;

  WindowSups(const ModelSpec& spec, double a, double b) : mu(spec.p), g(spec.p, spec.p) {
    const double xa = a / spec.horizon;
    const double xb = b / spec.horizon;
    for (std::size_t k = 0; k < spec.p; ++k) {
      mu[k] = spec.baseline[k].sup_on(xa, xb);
      for (std::size_t l = 0; l < spec.p; ++l)
        g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) =
            spec.reproduction(k, l).sup_on(xa, xb);
    }
  }
};

struct Candidate {
  double time;
  double mark;
  std::size_t component;
  bool operator>(const Candidate& o) const {
    if (time != o.time) return time > o.time;
    if (component != o.component) return component > o.component;
    return mark > o.mark;
  }
};

void record(EventLog& log, std::size_t k, double& last, double t, std::size_t max_events,
            std::size_t& accepted) {
  if (!(t > last)) t = std::nextafter(last, std::numeric_limits<double>::infinity());
  log.times[k].push_back(t);
  last = t;
  if (++accepted > max_events)
    throw RuntimeBudgetExceeded("simulation exceeded the event budget of " +
                                std::to_string(max_events));
}

/// Events still able to excite, per source component.
class ActiveSet {
 public:
  ActiveSet(const ModelSpec& spec, double prune_level)
      : spec_(spec), events_(spec.p), gsup_(reproduction_sup(spec)), prune_level_(prune_level) {}

  void add(std::size_t l, double t) { events_[l].push_back(t); }

  /// Drops the oldest events of each source whose envelope contribution at t
  /// is below the pruning level for every target. The envelope is
  /// nonincreasing, so once dropped an event stays negligible.
  void prune(double t) {
    if (prune_level_ <= 0.0) return;
    for (std::size_t l = 0; l < spec_.p; ++l) {
      auto& q = events_[l];
      while (!q.empty() && max_contribution(l, t - q.front()) < prune_level_) q.pop_front();
    }
  }

  /// sum_l g_kl * sum_s envelope_kl(t - s), with g given per pair.
  double envelope_sum(std::size_t k, const Eigen::MatrixXd& g, double t) const {
    double total = 0.0;
    for (std::size_t l = 0; l < spec_.p; ++l) {
      const double gk = g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
      if (gk == 0.0) continue;
      const Kernel& phi = spec_.kernel(k, l);
      double s = 0.0;
      for (double e : events_[l]) s += phi.envelope(t - e);
      total += gk * s;
    }
    return total;
  }

  /// lambda_k(t-) restricted to active events.
  double intensity(std::size_t k, double t) const {
    const double x = t / spec_.horizon;
    double total = spec_.baseline[k](x);
    for (std::size_t l = 0; l < spec_.p; ++l) {
      const double gk = spec_.reproduction(k, l)(x);
      if (gk == 0.0) continue;
      const Kernel& phi = spec_.kernel(k, l);
      double s = 0.0;
      for (double e : events_[l])
        if (e < t) s += phi(t - e);
      total += gk * s;
    }
    return total;
  }

 private:
  double max_contribution(std::size_t l, double age) const {
    double m = 0.0;
    for (std::size_t k = 0; k < spec_.p; ++k)
      m = std::max(m, gsup_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) *
                          spec_.kernel(k, l).envelope(age));
    return m;
  }

  const ModelSpec& spec_;
  std::vector<std::deque<double>> events_;
  Eigen::MatrixXd gsup_;
  double prune_level_;
};

}  // namespace

EventLog simulate(const ModelSpec& spec, std::uint64_t seed, const SimulationOptions& options) {
  check_options(options);
  validate_spec(spec);
  const std::size_t p = spec.p;
  const double H = options.band_height;
  const Windows windows(spec.horizon, options.window_fraction);

  EventLog log;
  log.times.assign(p, {});
  log.horizon = spec.horizon;
  log.spec_hash = spec_hash(spec);
  log.seed = seed;
  log.generator = "thinning";

  ActiveSet active(spec, options.prune_level);
  double last = 0.0;
  std::size_t accepted = 0;
  const std::uint64_t base_seed = seed ^ kThinningDomain;

  for (std::size_t w = 0; w < windows.count; ++w) {
    const double a = windows.start(w);
    const double b = windows.end(w);
    const WindowSups sups(spec, a, b);
    std::vector<double> bound(p, 0.0);
    std::vector<std::size_t> bands(p, 0);
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;

    // Recomputes the dominating rates valid on [t, b] and materializes any
    // mark bands they newly reach. Atoms at or before t in a fresh band have
    // marks above the old bound, so they would have been rejected anyway.
    auto refresh = [&](double t) {
      active.prune(t);
      for (std::size_t k = 0; k < p; ++k) {
        bound[k] = sups.mu[k] + active.envelope_sum(k, sups.g, t);
        const double needed = std::ceil(bound[k] / H);
        if (needed > 1e9)
          throw RuntimeBudgetExceeded("dominating intensity too large to thin against");
        while (static_cast<double>(bands[k]) < needed) {
          const auto j = static_cast<std::uint32_t>(bands[k]);
          CounterStream rng(base_seed, static_cast<std::uint32_t>(k),
                            static_cast<std::uint32_t>(w), j);
          for (double s = a + rng.exponential(H);;) {
            if (!(s < b)) break;
            const double mark = (static_cast<double>(j) + rng.uniform()) * H;
            if (s > t) heap.push({s, mark, k});
            s += rng.exponential(H);
          }
          ++bands[k];
        }
      }
    };

    refresh(a);
    while (!heap.empty()) {
      const Candidate c = heap.top();
      heap.pop();
      if (c.mark >= bound[c.component]) continue;
      const double lambda = active.intensity(c.component, c.time);
      if (c.mark < lambda) {
        record(log, c.component, last, c.time, options.max_events, accepted);
        if (last > spec.horizon) {
          log.times[c.component].pop_back();
          break;
        }
        active.add(c.component, last);
        refresh(last);
      }
    }
  }
  return log;
}

EventLog simulate_exp_fast(const ModelSpec& spec, std::uint64_t seed,
                           const SimulationOptions& options) {
  check_options(options);
  if (!all_exponential(spec.kernel))
    throw NotExponential("exp-fast generator needs exponential kernels in every coordinate");
  validate_spec(spec);
  const std::size_t p = spec.p;
  const auto P = static_cast<Eigen::Index>(p);
  const Windows windows(spec.horizon, options.window_fraction);

  Eigen::MatrixXd alpha(P, P);
  Eigen::MatrixXd beta(P, P);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t l = 0; l < p; ++l) {
      const Exponential& e = *spec.kernel(k, l).as_exponential();
      alpha(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = e.alpha;
      beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = e.beta;
    }

  EventLog log;
  log.times.assign(p, {});
  log.horizon = spec.horizon;
  log.spec_hash = spec_hash(spec);
  log.seed = seed;
  log.generator = "exp-fast";

  // S(k, l) = sum over events s of l of beta_kl exp(-beta_kl (t - s)).
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(P, P);
  auto decay = [&](double dt) { S.array() *= (-beta.array() * dt).exp(); };

  CounterStream rng(seed ^ kExpFastDomain, 0);
  std::vector<double> lambda(p);
  double t = 0.0;
  double last = 0.0;
  std::size_t accepted = 0;

  for (std::size_t w = 0; w < windows.count; ++w) {
    const double b = windows.end(w);
    const WindowSups sups(spec, windows.start(w), b);
    for (;;) {
      double bound = 0.0;
      for (Eigen::Index k = 0; k < P; ++k) {
        bound += sups.mu[static_cast<std::size_t>(k)];
        for (Eigen::Index l = 0; l < P; ++l) bound += sups.g(k, l) * alpha(k, l) * S(k, l);
      }
      if (bound <= 0.0) break;
      const double candidate = t + rng.exponential(bound);
      if (!(candidate < b)) break;
      decay(candidate - t);
      t = candidate;
      const double x = t / spec.horizon;
      double total = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        double v = spec.baseline[k](x);
        for (std::size_t l = 0; l < p; ++l) {
          const auto K = static_cast<Eigen::Index>(k);
          const auto L = static_cast<Eigen::Index>(l);
          if (S(K, L) != 0.0) v += spec.reproduction(k, l)(x) * alpha(K, L) * S(K, L);
        }
        lambda[k] = v;
        total += v;
      }
      const double u = rng.uniform() * bound;
      if (u >= total) continue;
      std::size_t k = 0;
      for (double cum = lambda[0]; cum <= u && k + 1 < p; cum += lambda[++k]) {
      }
      record(log, k, last, t, options.max_events, accepted);
      if (last > spec.horizon) {
        log.times[k].pop_back();
        return log;
      }
      S.col(static_cast<Eigen::Index>(k)) += beta.col(static_cast<Eigen::Index>(k));
    }
    decay(b - t);
    t = b;
  }
  return log;
}

namespace {

void check_log(const ModelSpec& spec, const EventLog& log) {
  if (log.dim() != spec.p)
    throw InvalidLog("event log has " + std::to_string(log.dim()) + " components, spec has " +
                     std::to_string(spec.p));
  if (log.horizon != spec.horizon) throw InvalidLog("event log horizon differs from the spec");
  log.check_invariants();
}

}  // namespace

std::vector<std::vector<double>> intensity_path(const ModelSpec& spec, const EventLog& log,
                                                std::span<const double> grid) {
  check_log(spec, log);
  for (double t : grid)
    if (!(t >= 0.0 && t <= spec.horizon))
      throw GridOutOfRange("intensity grid point outside [0, horizon]");
  std::vector<std::vector<double>> out(spec.p, std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double x = t / spec.horizon;
    for (std::size_t k = 0; k < spec.p; ++k) {
      double v = spec.baseline[k](x);
      for (std::size_t l = 0; l < spec.p; ++l) {
        const double g = spec.reproduction(k, l)(x);
        if (g == 0.0) continue;
        const auto& tl = log.times[l];
        const auto end = std::lower_bound(tl.begin(), tl.end(), t);
        double s = 0.0;
        for (auto it = tl.begin(); it != end; ++it) s += spec.kernel(k, l)(t - *it);
        v += g * s;
      }
      out[k][i] = v;
    }
  }
  return out;
}

namespace {

struct Stamped {
  double time;
  std::size_t component;
};

/// Points in (a, b) where some integrand term may fail to be smooth.
std::vector<double> breakpoints(const ModelSpec& spec,
                                const std::vector<std::deque<double>>& active, double a,
                                double b) {
  std::vector<double> pts;
  auto add_table = [&](const ScalarCurve& c) {
    if (const auto* tab = std::get_if<Table>(&c.form()))
      for (double x : tab->knots) {
        const double t = x * spec.horizon;
        if (t > a && t < b) pts.push_back(t);
      }
  };
  for (std::size_t k = 0; k < spec.p; ++k) {
    add_table(spec.baseline[k]);
    for (std::size_t l = 0; l < spec.p; ++l) add_table(spec.reproduction(k, l));
  }
  for (std::size_t k = 0; k < spec.p; ++k)
    for (std::size_t l = 0; l < spec.p; ++l) {
      const auto* hist = std::get_if<Histogram>(&spec.kernel(k, l).form());
      if (hist == nullptr) continue;
      const double wdt = hist->width;
      const auto bins = static_cast<double>(hist->heights.size());
      for (double s : active[l]) {
        const double first = std::max(1.0, std::ceil((a - s) / wdt));
        for (double m = first; m <= bins; m += 1.0) {
          const double t = s + m * wdt;
          if (t >= b) break;
          if (t > a) pts.push_back(t);
        }
      }
    }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

ResidualReport compensator_residuals(const ModelSpec& spec, const EventLog& log) {
  check_log(spec, log);
  const std::size_t p = spec.p;
  std::vector<Stamped> events;
  events.reserve(log.total());
  for (std::size_t k = 0; k < p; ++k)
    for (double t : log.times[k]) events.push_back({t, k});
  std::sort(events.begin(), events.end(),
            [](const Stamped& x, const Stamped& y) { return x.time < y.time; });

  const Eigen::MatrixXd gsup = reproduction_sup(spec);
  std::vector<std::deque<double>> active(p);
  std::vector<double> compensator(p, 0.0);
  std::vector<double> at_last_event(p, 0.0);
  ResidualReport report;
  report.components.resize(p);

  auto integrand = [&](std::size_t k) {
    return [&, k](double u) {
      const double x = u / spec.horizon;
      double v = spec.baseline[k](x);
      for (std::size_t l = 0; l < p; ++l) {
        if (active[l].empty()) continue;
        const double g = spec.reproduction(k, l)(x);
        if (g == 0.0) continue;
        const Kernel& phi = spec.kernel(k, l);
        double s = 0.0;
        for (double e : active[l]) s += phi(u - e);
        v += g * s;
      }
      return v;
    };
  };

  double prev = 0.0;
  for (const auto& [t, k] : events) {
    std::vector<double> cuts = breakpoints(spec, active, prev, t);
    cuts.insert(cuts.begin(), prev);
    cuts.push_back(t);
    for (std::size_t j = 0; j < p; ++j) {
      auto f = integrand(j);
      double piece = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        piece += integrate_adaptive(f, cuts[i], cuts[i + 1], 1e-10);
      compensator[j] += piece;
    }
    report.components[k].samples.push_back(compensator[k] - at_last_event[k]);
    at_last_event[k] = compensator[k];
    active[k].push_back(t);
    prev = t;
    for (std::size_t l = 0; l < p; ++l) {
      auto& q = active[l];
      while (!q.empty()) {
        double m = 0.0;
        for (std::size_t j = 0; j < p; ++j)
          m = std::max(m, gsup(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) *
                              spec.kernel(j, l).envelope(t - q.front()));
        if (m >= 1e-17) break;
        q.pop_front();
      }
    }
  }

  const auto exp_cdf = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
  auto finish = [&](ComponentResiduals& r) {
    r.events = r.samples.size();
    if (r.samples.empty()) return;
    const auto ks = stats::ks_test(r.samples, exp_cdf);
    r.ks_statistic = ks.statistic;
    r.ks_pvalue = ks.pvalue;
  };
  for (auto& r : report.components) {
    finish(r);
    report.pooled.samples.insert(report.pooled.samples.end(), r.samples.begin(), r.samples.end());
  }
  finish(report.pooled);
  return report;
}

}  // namespace hawkes_ls
