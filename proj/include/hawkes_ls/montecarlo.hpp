#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hawkes_ls/model.hpp"
#include "hawkes_ls/simulate.hpp"

namespace hawkes_ls {

enum class Generator { Thinning, ExpFast };

/// "thinning" or "exp-fast". Throws DomainError for anything else.
Generator parse_generator(const std::string& name);
std::string generator_name(Generator g);

struct McOptions {
  std::size_t replications = 500;
  std::uint64_t seed = 42;
  /// Equispaced nodes on [0, 1], both ends included.
  std::size_t u_nodes = 201;
  /// 0 = resolve_threads() default.
  unsigned threads = 0;
  Generator generator = Generator::Thinning;
  SimulationOptions simulation;
};

/// Counts N_k(T u_j) of every replication. Replication r runs with
/// replication_seed(seed, r), so each row is independent of the thread count.
struct CountSample {
  double horizon = 0.0;
  std::size_t p = 0;
  std::uint64_t seed = 0;
  std::vector<double> u;
  std::vector<std::uint64_t> seeds;
  /// replications x (u.size() * p); column j * p + k holds N_k(T u_j).
  Eigen::MatrixXd counts;

  std::size_t replications() const noexcept { return static_cast<std::size_t>(counts.rows()); }
  /// All replications of N_k(T u_j).
  Eigen::VectorXd column(std::size_t j, std::size_t k) const {
    return counts.col(static_cast<Eigen::Index>(j * p + k));
  }
};

/// Throws DomainError (replications < 2, u_nodes < 2) and whatever the
/// generator throws.
CountSample replicate_counts(const ModelSpec& spec, const McOptions& options);

/// Equispaced grid of n nodes on [0, 1].
std::vector<double> unit_grid(std::size_t n);

enum class Centering { Expectation, Lln };

Centering parse_centering(const std::string& name);
std::string centering_name(Centering c);

/// Centering path c(u) / T at the sample's u-nodes (one p-vector per node):
/// E[N(Tu)] / T from the quadrature of the mean intensity on a step close to
/// `step`, or L(u). Throws CenteringUnavailable when the LLN centering is
/// requested for a spec without Lipschitz mu and sqrt-integrable phi.
std::vector<Eigen::VectorXd> centering_path(const ModelSpec& spec, const std::vector<double>& u,
                                            Centering centering, double step = 0.05);

/// Z_k(u_j) = T^{-1/2} (N_k(T u_j) - c_k(u_j)), replications x (u.size() * p).
Eigen::MatrixXd rescaled_fluctuations(const CountSample& sample,
                                      const std::vector<Eigen::VectorXd>& center);

struct McReport {
  std::uint64_t spec_hash = 0;
  std::size_t replications = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::string generator;
  std::vector<double> u;
  std::vector<std::uint64_t> seeds;

  // Law of large numbers, one p-vector per u-node.
  std::vector<Eigen::VectorXd> mean_path;       // empirical N(Tu) / T
  std::vector<Eigen::VectorXd> lln;             // L(u)
  std::vector<Eigen::VectorXd> standard_error;  // sqrt(C_kk(u) / (n T))
  double sup_deviation = 0.0;                   // max over u, k of |mean - L|
  /// Share of u-nodes where every component lies within band_width standard errors.
  double band_fraction = 0.0;
  double band_width = 4.0;

  // Fluctuations; empty unless the report came from run_clt.
  std::optional<Centering> centering;
  std::vector<Eigen::VectorXd> center;  // c(u) / T
  std::vector<Eigen::VectorXd> z_mean;
  std::vector<Eigen::MatrixXd> empirical_cov;
  std::vector<Eigen::MatrixXd> theory_cov;
  /// Per component; NaN where the theoretical variance vanishes (u = 0).
  std::vector<Eigen::VectorXd> skewness;
  std::vector<Eigen::VectorXd> excess_kurtosis;
  std::vector<Eigen::VectorXd> ks_statistic;  // against N(0, C_kk(u))
  std::vector<Eigen::VectorXd> ks_pvalue;

  double wall_clock_seconds = 0.0;

  /// Index of the u-node closest to x.
  std::size_t node(double x) const;
};

/// Mean path against the LLN curve, with the standard-error band.
McReport lln_report(const ModelSpec& spec, const CountSample& sample, double band_width = 4.0);

/// lln_report plus the fluctuation statistics under the given centering.
McReport clt_report(const ModelSpec& spec, const CountSample& sample, Centering centering);

McReport run_lln(const ModelSpec& spec, const McOptions& options);
McReport run_clt(const ModelSpec& spec, const McOptions& options, Centering centering);

/// Full report; wall-clock time is left out so that the document is a pure
/// function of the inputs. NaN becomes null.
nlohmann::json to_json(const McReport& report);

/// Per-u table: u, then per component mean, lln, se and, for CLT reports,
/// center, var, theory_var, skewness, excess_kurtosis, ks_pvalue.
void write_csv(const McReport& report, std::ostream& out);

/// Plot layout: u, empirical_k, theoretical_k.
void write_plot_csv(const McReport& report, std::ostream& out);

}  // namespace hawkes_ls
