#include "hawkes_ls/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/limits.hpp"
#include "hawkes_ls/parallel.hpp"
#include "hawkes_ls/resolvent.hpp"
#include "hawkes_ls/rng.hpp"
#include "hawkes_ls/spec_io.hpp"
#include "hawkes_ls/stats.hpp"
#include "hawkes_ls/text.hpp"

namespace hawkes_ls {

Generator parse_generator(const std::string& name) {
  if (name == "thinning") return Generator::Thinning;
  if (name == "exp-fast") return Generator::ExpFast;
  throw DomainError("unknown generator \"" + name + "\" (expected thinning or exp-fast)");
}

std::string generator_name(Generator g) {
  return g == Generator::Thinning ? "thinning" : "exp-fast";
}

Centering parse_centering(const std::string& name) {
  if (name == "expectation") return Centering::Expectation;
  if (name == "lln") return Centering::Lln;
  throw DomainError("unknown centering \"" + name + "\" (expected expectation or lln)");
}

std::string centering_name(Centering c) { return c == Centering::Expectation ? "expectation" : "lln"; }

std::vector<double> unit_grid(std::size_t n) {
  if (n < 2) throw DomainError("a u-grid needs at least 2 nodes");
  std::vector<double> u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = static_cast<double>(j) / static_cast<double>(n - 1);
  return u;
}

CountSample replicate_counts(const ModelSpec& spec, const McOptions& options) {
  if (options.replications < 2) throw DomainError("at least 2 replications are needed");
  CountSample out;
  out.horizon = spec.horizon;
  out.p = spec.p;
  out.seed = options.seed;
  out.u = unit_grid(options.u_nodes);
  const std::size_t n = options.replications;
  const std::size_t cols = out.u.size() * spec.p;
  out.seeds.resize(n);
  for (std::size_t r = 0; r < n; ++r) out.seeds[r] = replication_seed(options.seed, r);
  out.counts.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  validate_spec(spec);

  parallel_for(n, resolve_threads(options.threads), [&](std::size_t r) {
    const EventLog log = options.generator == Generator::Thinning
                             ? simulate(spec, out.seeds[r], options.simulation)
                             : simulate_exp_fast(spec, out.seeds[r], options.simulation);
    for (std::size_t k = 0; k < spec.p; ++k) {
      const auto& tk = log.times[k];
      auto it = tk.begin();
      for (std::size_t j = 0; j < out.u.size(); ++j) {
        const double t = out.u[j] * spec.horizon;
        it = std::upper_bound(it, tk.end(), t);
        out.counts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j * spec.p + k)) =
            static_cast<double>(it - tk.begin());
      }
    }
  });
  return out;
}

std::vector<Eigen::VectorXd> centering_path(const ModelSpec& spec, const std::vector<double>& u,
                                            Centering centering, double step) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(u.size());
  if (centering == Centering::Lln) {
    if (!stability_summary(spec).lln_centering_available())
      throw CenteringUnavailable(
          "LLN centering needs a Lipschitz baseline and a kernel with int phi(s) sqrt(s) ds < inf");
    const auto curve = lln_curve(spec);
    for (double x : u) out.push_back(curve.lln_at(x));
    return out;
  }
  // A step that puts every u-node T u_j on the quadrature grid when u is equispaced.
  const double T = spec.horizon;
  const auto segments = static_cast<double>(std::max<std::size_t>(u.size(), 2) - 1);
  const double cells = segments * std::ceil(T / (step * segments));
  const auto mean = mean_intensity(spec, T / cells);
  for (double x : u) {
    const auto idx = static_cast<std::size_t>(std::llround(x * cells));
    const double t = mean.count.t(idx);
    Eigen::VectorXd c = std::abs(t - x * T) <= 1e-9 * T ? Eigen::VectorXd(mean.count[idx])
                                                        : Eigen::VectorXd(mean.count.at(x * T));
    out.push_back(c / T);
  }
  return out;
}

Eigen::MatrixXd rescaled_fluctuations(const CountSample& sample,
                                      const std::vector<Eigen::VectorXd>& center) {
  const double T = sample.horizon;
  Eigen::MatrixXd z = sample.counts;
  for (std::size_t j = 0; j < sample.u.size(); ++j)
    for (std::size_t k = 0; k < sample.p; ++k)
      z.col(static_cast<Eigen::Index>(j * sample.p + k)).array() -=
          T * center[j](static_cast<Eigen::Index>(k));
  return z / std::sqrt(T);
}

std::size_t McReport::node(double x) const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < u.size(); ++j)
    if (std::abs(u[j] - x) < std::abs(u[best] - x)) best = j;
  return best;
}

namespace {

/// The (u, k) entries as a vector, in u-grid order.
std::vector<double> entries(const Eigen::MatrixXd& m, std::size_t col) {
  const auto c = m.col(static_cast<Eigen::Index>(col));
  return {c.data(), c.data() + c.size()};
}

}  // namespace

McReport lln_report(const ModelSpec& spec, const CountSample& sample, double band_width) {
  McReport out;
  out.spec_hash = spec_hash(spec);
  out.replications = sample.replications();
  out.horizon = sample.horizon;
  out.seed = sample.seed;
  out.u = sample.u;
  out.seeds = sample.seeds;
  out.band_width = band_width;
  const auto J = sample.u.size();
  const auto p = static_cast<Eigen::Index>(sample.p);
  const double n = static_cast<double>(out.replications);
  const double T = sample.horizon;

  const auto curve = limit_curve(spec, J);
  std::size_t inside = 0;
  for (std::size_t j = 0; j < J; ++j) {
    Eigen::VectorXd mean(p), se(p);
    bool ok = true;
    for (Eigen::Index k = 0; k < p; ++k) {
      mean(k) = stats::mean(entries(sample.counts, j * sample.p + static_cast<std::size_t>(k))) / T;
      se(k) = std::sqrt(std::max(0.0, curve.cov[j](k, k)) / (n * T));
      const double dev = std::abs(mean(k) - curve.lln[j](k));
      out.sup_deviation = std::max(out.sup_deviation, dev);
      if (dev > band_width * se(k)) ok = false;
    }
    if (ok) ++inside;
    out.mean_path.push_back(mean);
    out.lln.push_back(curve.lln[j]);
    out.standard_error.push_back(se);
    out.theory_cov.push_back(curve.cov[j]);
  }
  out.band_fraction = static_cast<double>(inside) / static_cast<double>(J);
  return out;
}

McReport clt_report(const ModelSpec& spec, const CountSample& sample, Centering centering) {
  McReport out = lln_report(spec, sample);
  out.centering = centering;
  out.center = centering_path(spec, sample.u, centering);
  const Eigen::MatrixXd z = rescaled_fluctuations(sample, out.center);
  const auto p = static_cast<Eigen::Index>(sample.p);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 0; j < sample.u.size(); ++j) {
    const Eigen::MatrixXd block = z.middleCols(static_cast<Eigen::Index>(j * sample.p), p);
    out.z_mean.push_back(block.colwise().mean().transpose());
    out.empirical_cov.push_back(stats::covariance(block));
    Eigen::VectorXd skew(p), kurt(p), ks(p), pv(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      const auto xs = entries(block, static_cast<std::size_t>(k));
      const double var = out.theory_cov[j](k, k);
      const bool degenerate = !(var > 0.0) || stats::variance(xs) == 0.0;
      skew(k) = degenerate ? nan : stats::skewness(xs);
      kurt(k) = degenerate ? nan : stats::excess_kurtosis(xs);
      if (!(var > 0.0)) {
        ks(k) = nan;
        pv(k) = nan;
        continue;
      }
      const double sd = std::sqrt(var);
      const auto res = stats::ks_test(xs, [sd](double x) { return stats::normal_cdf(x / sd); });
      ks(k) = res.statistic;
      pv(k) = res.pvalue;
    }
    out.skewness.push_back(skew);
    out.excess_kurtosis.push_back(kurt);
    out.ks_statistic.push_back(ks);
    out.ks_pvalue.push_back(pv);
  }
  return out;
}

McReport run_lln(const ModelSpec& spec, const McOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  McReport out = lln_report(spec, replicate_counts(spec, options));
  out.generator = generator_name(options.generator);
  out.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

McReport run_clt(const ModelSpec& spec, const McOptions& options, Centering centering) {
  const auto start = std::chrono::steady_clock::now();
  // Fail before simulating when the centering cannot be formed.
  if (centering == Centering::Lln) centering_path(spec, {0.0, 1.0}, centering);
  McReport out = clt_report(spec, replicate_counts(spec, options), centering);
  out.generator = generator_name(options.generator);
  out.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace {

nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

nlohmann::json vectors(const std::vector<Eigen::VectorXd>& vs) {
  auto out = nlohmann::json::array();
  for (const auto& v : vs) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) row.push_back(number(v(k)));
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::json matrices(const std::vector<Eigen::MatrixXd>& ms) {
  auto out = nlohmann::json::array();
  for (const auto& m : ms) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      auto row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
      rows.push_back(std::move(row));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const McReport& r) {
  nlohmann::json doc;
  doc["spec_hash"] = hash_hex(r.spec_hash);
  doc["replications"] = r.replications;
  doc["horizon"] = r.horizon;
  doc["seed"] = r.seed;
  doc["generator"] = r.generator;
  doc["u"] = r.u;
  doc["seeds"] = r.seeds;
  doc["mean_path"] = vectors(r.mean_path);
  doc["lln"] = vectors(r.lln);
  doc["standard_error"] = vectors(r.standard_error);
  doc["sup_deviation"] = number(r.sup_deviation);
  doc["band_width"] = r.band_width;
  doc["band_fraction"] = r.band_fraction;
  doc["theory_cov"] = matrices(r.theory_cov);
  if (r.centering) {
    doc["centering"] = centering_name(*r.centering);
    doc["center"] = vectors(r.center);
    doc["z_mean"] = vectors(r.z_mean);
    doc["empirical_cov"] = matrices(r.empirical_cov);
    doc["skewness"] = vectors(r.skewness);
    doc["excess_kurtosis"] = vectors(r.excess_kurtosis);
    doc["ks_statistic"] = vectors(r.ks_statistic);
    doc["ks_pvalue"] = vectors(r.ks_pvalue);
  }
  return doc;
}

namespace {

std::string cell(double x) { return std::isfinite(x) ? format_double(x) : std::string("nan"); }

}  // namespace

void write_csv(const McReport& r, std::ostream& out) {
  const auto p = r.lln.empty() ? 0 : r.lln[0].size();
  out << 'u';
  for (Eigen::Index k = 1; k <= p; ++k) {
    out << ",mean_" << k << ",lln_" << k << ",se_" << k;
    if (r.centering)
      out << ",center_" << k << ",var_" << k << ",theory_var_" << k << ",skewness_" << k
          << ",excess_kurtosis_" << k << ",ks_pvalue_" << k;
  }
  out << '\n';
  for (std::size_t j = 0; j < r.u.size(); ++j) {
    out << format_double(r.u[j]);
    for (Eigen::Index k = 0; k < p; ++k) {
      out << ',' << cell(r.mean_path[j](k)) << ',' << cell(r.lln[j](k)) << ','
          << cell(r.standard_error[j](k));
      if (r.centering)
        out << ',' << cell(r.center[j](k)) << ',' << cell(r.empirical_cov[j](k, k)) << ','
            << cell(r.theory_cov[j](k, k)) << ',' << cell(r.skewness[j](k)) << ','
            << cell(r.excess_kurtosis[j](k)) << ',' << cell(r.ks_pvalue[j](k));
    }
    out << '\n';
  }
}

void write_plot_csv(const McReport& r, std::ostream& out) {
  const auto p = r.lln.empty() ? 0 : r.lln[0].size();
  out << 'u';
  if (p == 1) {
    out << ",empirical,theoretical";
  } else {
    for (Eigen::Index k = 1; k <= p; ++k) out << ",empirical_" << k << ",theoretical_" << k;
  }
  out << '\n';
  for (std::size_t j = 0; j < r.u.size(); ++j) {
    out << format_double(r.u[j]);
    for (Eigen::Index k = 0; k < p; ++k)
      out << ',' << cell(r.mean_path[j](k)) << ',' << cell(r.lln[j](k));
    out << '\n';
  }
}

}  // namespace hawkes_ls
