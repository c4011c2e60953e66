#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/event_log.hpp"
#include "hawkes_ls/finance.hpp"
#include "hawkes_ls/limits.hpp"
#include "hawkes_ls/montecarlo.hpp"
#include "hawkes_ls/parallel.hpp"
#include "hawkes_ls/resolvent.hpp"
#include "hawkes_ls/rng.hpp"
#include "hawkes_ls/simulate.hpp"
#include "hawkes_ls/spec_io.hpp"
#include "hawkes_ls/text.hpp"
#include "hawkes_ls/version.hpp"
#include "presets.hpp"

namespace hawkes_ls::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Every option any subcommand can take; each subcommand binds a subset.
struct Args {
  std::string config;
  std::string spec_path;
  std::optional<json> inline_spec;
  std::string preset;
  std::string out = "out";
  unsigned threads = 0;
  std::uint64_t seed = 42;
  std::optional<double> horizon;

  // simulate / intensity
  std::string generator = "thinning";
  std::string format = "csv";
  std::string events;
  std::size_t points = 1001;
  bool residuals = false;

  // resolvent / cesaro
  bool check_exp = false;
  std::string what = "mean";
  double step = 0.05;
  std::size_t x_nodes = 101;
  double u = 1.0;
  std::vector<double> horizons = {50.0, 100.0, 200.0, 400.0};

  // lln / clt
  std::optional<std::size_t> n;
  std::size_t u_nodes = 201;
  std::string centering = "expectation";
  std::size_t limit_paths = 0;
  std::size_t path_steps = 1000;
  double band = 4.0;

  // slippage
  std::optional<double> mu0, delta_mu, alpha0, eta, beta;
  std::size_t bootstrap = 1000;
  double confidence = 0.95;
};

/// Files are written under temporary names and renamed into place only when
/// the whole command succeeds; anything left uncommitted is deleted.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    std::error_code ec;
    for (auto& f : files_) {
      f.stream.reset();
      fs::remove(f.temp, ec);
    }
    if (created_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

  std::ostream& open(const std::string& name) {
    if (!fs::exists(dir_)) created_ = fs::create_directories(dir_);
    File f;
    f.name = name;
    f.temp = dir_ / (name + ".partial");
    f.stream = std::make_unique<std::ofstream>(f.temp, std::ios::binary);
    if (!*f.stream) throw DomainError("cannot write " + f.temp.string());
    f.stream->imbue(std::locale::classic());
    files_.push_back(std::move(f));
    return *files_.back().stream;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& f : files_) out.push_back(f.name);
    return out;
  }

  void commit() {
    for (auto& f : files_) {
      f.stream->flush();
      if (!*f.stream) throw DomainError("write failed for " + f.temp.string());
      f.stream.reset();
    }
    for (auto& f : files_) fs::rename(f.temp, dir_ / f.name);
    files_.clear();
  }

  const fs::path& dir() const { return dir_; }

 private:
  struct File {
    std::string name;
    fs::path temp;
    std::unique_ptr<std::ofstream> stream;
  };
  fs::path dir_;
  std::vector<File> files_;
  bool created_ = false;
};

struct Resolved {
  ModelSpec spec;
  const Preset* preset = nullptr;
};

Resolved resolve_spec(const Args& a, bool required = true) {
  Resolved r;
  const int sources = static_cast<int>(a.inline_spec.has_value()) +
                      static_cast<int>(!a.spec_path.empty()) + static_cast<int>(!a.preset.empty());
  if (sources > 1) throw CLI::ValidationError("give only one of --spec, --preset or an inline spec");
  if (a.inline_spec) {
    r.spec = spec_from_json(*a.inline_spec);
  } else if (!a.spec_path.empty()) {
    r.spec = load_spec(a.spec_path);
  } else if (!a.preset.empty()) {
    r.preset = &find_preset(a.preset);
    r.spec = r.preset->spec;
  } else if (required) {
    throw CLI::RequiredError("a model: --spec FILE, --preset NAME or \"spec\" in --config");
  }
  if (a.horizon) {
    if (!(*a.horizon > 0.0)) throw CLI::ValidationError("--horizon must be positive");
    r.spec.horizon = *a.horizon;
  }
  return r;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// The manifest is the only output allowed to vary between identical runs.
void finish(OutputSet& out, const std::string& command, const Args& a, const Resolved* model,
            json parameters, double seconds) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["parameters"] = std::move(parameters);
  if (model != nullptr) {
    m["spec_hash"] = hash_hex(spec_hash(model->spec));
    m["spec"] = to_json(model->spec);
    if (model->preset != nullptr) {
      m["preset"] = model->preset->name;
      m["preset_description"] = model->preset->description;
      m["stated_parameters"] = model->preset->stated;
      m["artifact_choice"] = model->preset->artifact_choices;
    }
  }
  m["seed"] = a.seed;
  m["files"] = out.names();
  m["finished_utc"] = utc_now();
  m["wall_clock_seconds"] = seconds;
  out.open("manifest.json") << m.dump(2) << '\n';
  out.commit();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fixed(double x, int digits = 6) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

json summary_json(const StabilitySummary& s) {
  json doc;
  doc["spectral_radius"] = s.spectral_radius;
  doc["stable"] = s.stable();
  json b = json::array();
  for (Eigen::Index i = 0; i < s.branching_bound.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < s.branching_bound.cols(); ++j) row.push_back(s.branching_bound(i, j));
    b.push_back(row);
  }
  doc["branching_bound"] = b;
  doc["phi_l1_plus_eps"] = s.phi_l1_plus_eps;
  doc["phi_sqrt_integrable"] = s.phi_sqrt_integrable;
  doc["mu_lipschitz"] = s.mu_lipschitz;
  doc["g_differentiable"] = s.g_differentiable;
  doc["lln_centering_available"] = s.lln_centering_available();
  return doc;
}

McOptions mc_options(const Args& a, const Resolved& model) {
  McOptions o;
  o.replications = a.n ? *a.n : (model.preset != nullptr ? model.preset->replications : 500);
  o.seed = a.seed;
  o.u_nodes = a.u_nodes;
  o.threads = resolve_threads(a.threads);
  o.generator = parse_generator(a.generator);
  return o;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Args& a) {
  const auto model = resolve_spec(a);
  const auto summary = stability_summary(model.spec);
  json doc = summary_json(summary);
  doc["spec_hash"] = hash_hex(spec_hash(model.spec));
  std::cout << doc.dump(2) << '\n';
  if (!summary.stable()) {
    std::cerr << "Unstable: spectral radius " << format_double(summary.spectral_radius)
              << " >= 1\n";
    return kExitModel;
  }
  if (!summary.g_differentiable)
    std::cerr << "warning: a reproduction coordinate is tabulated (not differentiable)\n";
  return kExitOk;
}

int cmd_simulate(const Args& a) {
  const auto start = std::chrono::steady_clock::now();
  const auto model = resolve_spec(a);
  const auto gen = parse_generator(a.generator);
  if (a.format != "csv" && a.format != "binary")
    throw CLI::ValidationError("--format must be csv or binary");
  const EventLog log =
      gen == Generator::Thinning ? simulate(model.spec, a.seed) : simulate_exp_fast(model.spec, a.seed);
  OutputSet out(a.out);
  if (a.format == "csv") {
    write_csv(log, out.open("events.csv"));
  } else {
    write_binary(log, out.open("events.bin"));
  }
  json counts = json::array();
  for (const auto& tk : log.times) counts.push_back(tk.size());
  std::cout << json{{"events", counts}, {"horizon", log.horizon}, {"seed", a.seed}}.dump() << '\n';
  finish(out, "simulate", a, &model, {{"generator", a.generator}, {"format", a.format}},
         seconds_since(start));
  return kExitOk;
}

EventLog read_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidLog("cannot open " + path);
  char first = 0;
  in.get(first);
  in.seekg(0);
  return first == 'H' ? read_binary(in) : read_csv(in);
}

int cmd_intensity(const Args& a) {
  const auto start = std::chrono::steady_clock::now();
  const auto model = resolve_spec(a);
  const EventLog log = a.events.empty() ? simulate(model.spec, a.seed) : read_log(a.events);
  if (log.dim() != model.spec.p) throw InvalidLog("event log dimension differs from the model");
  if (a.points < 2) throw CLI::ValidationError("--points must be at least 2");
  std::vector<double> grid(a.points);
  for (std::size_t i = 0; i < a.points; ++i)
    grid[i] = log.horizon * static_cast<double>(i) / static_cast<double>(a.points - 1);
  grid.back() = log.horizon;
  const auto lambda = intensity_path(model.spec, log, grid);

  OutputSet out(a.out);
  auto& csv = out.open("intensity.csv");
  csv << 't';
  for (std::size_t k = 0; k < lambda.size(); ++k) csv << ",lambda_" << k + 1;
  csv << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv << format_double(grid[i]);
    for (const auto& lk : lambda) csv << ',' << format_double(lk[i]);
    csv << '\n';
  }
  if (a.residuals) {
    const auto rep = compensator_residuals(model.spec, log);
    json doc;
    json comps = json::array();
    for (const auto& c : rep.components)
      comps.push_back({{"events", c.events}, {"ks_statistic", c.ks_statistic}, {"ks_pvalue", c.ks_pvalue}});
    doc["components"] = comps;
    doc["pooled"] = {{"events", rep.pooled.events},
                     {"ks_statistic", rep.pooled.ks_statistic},
                     {"ks_pvalue", rep.pooled.ks_pvalue}};
    out.open("residuals.json") << doc.dump(2) << '\n';
    std::cout << doc.dump() << '\n';
  }
  finish(out, "intensity", a, &model,
         {{"events", a.events.empty() ? json("simulated") : json(a.events)},
          {"points", a.points},
          {"residuals", a.residuals}},
         seconds_since(start));
  return kExitOk;
}

int cmd_resolvent(const Args& a) {
  const auto start = std::chrono::steady_clock::now();
  if (a.check_exp) {
    // Psi(t) = alpha beta exp(-(1 - alpha) beta t) for phi = alpha beta exp(-beta t).
    const double alpha = 0.5, beta = 1.0, h = 1e-3, T = 20.0;
    const auto n = horizon_nodes(T, h);
    const auto psi = conv_resolvent(KernelMatrix(1, Kernel(Exponential{alpha, beta})),
                                    Eigen::MatrixXd::Identity(1, 1), h, n);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(psi[j](0, 0) - alpha * beta * std::exp(-(1 - alpha) * beta * psi.t(j))));
    std::cout << json{{"check", "exponential"}, {"alpha", alpha}, {"beta", beta}, {"step", h},
                      {"horizon", T}, {"max_error", worst}, {"pass", worst <= 1e-6}}
                     .dump()
              << '\n';
    return kExitOk;
  }
  const auto model = resolve_spec(a);
  validate_spec(model.spec);
  OutputSet out(a.out);
  json params = {{"what", a.what}, {"step", a.step}};
  if (a.what == "mean") {
    const auto m = mean_intensity(model.spec, a.step);
    auto& csv = out.open("mean_intensity.csv");
    csv << 't';
    for (std::size_t k = 1; k <= model.spec.p; ++k) csv << ",intensity_" << k;
    for (std::size_t k = 1; k <= model.spec.p; ++k) csv << ",count_" << k;
    csv << '\n';
    for (std::size_t j = 0; j < m.intensity.size(); ++j) {
      csv << format_double(m.intensity.t(j));
      for (Eigen::Index k = 0; k < m.intensity[j].rows(); ++k) csv << ',' << format_double(m.intensity[j](k, 0));
      for (Eigen::Index k = 0; k < m.count[j].rows(); ++k) csv << ',' << format_double(m.count[j](k, 0));
      csv << '\n';
    }
  } else if (a.what == "gamma") {
    if (a.x_nodes < 2) throw CLI::ValidationError("--x-nodes must be at least 2");
    std::vector<GammaCheck> checks(a.x_nodes);
    parallel_for(a.x_nodes, resolve_threads(a.threads), [&](std::size_t i) {
      checks[i] = gamma_check(model.spec, static_cast<double>(i) / static_cast<double>(a.x_nodes - 1), a.step);
    });
    auto& csv = out.open("gamma.csv");
    const auto p = model.spec.p;
    csv << 'x';
    for (std::size_t k = 1; k <= p; ++k)
      for (std::size_t l = 1; l <= p; ++l) csv << ",closed_" << k << '_' << l;
    for (std::size_t k = 1; k <= p; ++k)
      for (std::size_t l = 1; l <= p; ++l) csv << ",quadrature_" << k << '_' << l;
    csv << ",truncation,tail_estimate,max_error\n";
    double worst = 0.0;
    for (const auto& c : checks) {
      csv << format_double(c.x);
      for (const auto* m : {&c.closed_form, &c.quadrature})
        for (Eigen::Index k = 0; k < m->rows(); ++k)
          for (Eigen::Index l = 0; l < m->cols(); ++l) csv << ',' << format_double((*m)(k, l));
      csv << ',' << format_double(c.truncation) << ',' << format_double(c.tail_estimate) << ','
          << format_double(c.max_error) << '\n';
      worst = std::max(worst, c.max_error);
    }
    std::cout << json{{"max_error", worst}, {"x_nodes", a.x_nodes}}.dump() << '\n';
    params["x_nodes"] = a.x_nodes;
  } else if (a.what == "triangle") {
    write_csv(volterra_resolvent(model.spec, a.step), out.open("resolvent.csv"));
  } else if (a.what == "domination") {
    const auto tri = volterra_resolvent(model.spec, a.step);
    const auto bound = bounding_resolvent(model.spec, a.step, tri.size());
    write_csv(bound, out.open("bound.csv"));
    const double excess = domination_excess(tri, bound);
    std::cout << json{{"domination_excess", excess}, {"dominated", excess <= 0.0}}.dump() << '\n';
  } else {
    throw CLI::ValidationError("--what must be mean, gamma, triangle or domination");
  }
  finish(out, "resolvent", a, &model, params, seconds_since(start));
  return kExitOk;
}

int cmd_lln(const Args& a) {
  const auto start = std::chrono::steady_clock::now();
  const auto model = resolve_spec(a);
  const auto opts = mc_options(a, model);
  const auto sample = replicate_counts(model.spec, opts);
  auto report = lln_report(model.spec, sample, a.band);
  report.generator = generator_name(opts.generator);
  OutputSet out(a.out);
  write_plot_csv(report, out.open("lln.csv"));
  write_csv(report, out.open("lln_table.csv"));
  write_csv(limit_curve(model.spec, a.u_nodes), out.open("limits.csv"));
  out.open("report.json") << to_json(report).dump(2) << '\n';
  std::cout << json{{"replications", report.replications},
                    {"sup_deviation", report.sup_deviation},
                    {"band_width", report.band_width},
                    {"band_fraction", report.band_fraction}}
                   .dump()
            << '\n';
  finish(out, "lln", a, &model,
         {{"replications", opts.replications}, {"u_nodes", a.u_nodes}, {"generator", a.generator},
          {"band", a.band}},
         seconds_since(start));
  return kExitOk;
}

int cmd_clt(const Args& a) {
  const auto start = std::chrono::steady_clock::now();
  const auto model = resolve_spec(a);
  const auto opts = mc_options(a, model);
  const auto centering = parse_centering(a.centering);
  auto report = run_clt(model.spec, opts, centering);
  OutputSet out(a.out);
  write_csv(report, out.open("clt.csv"));
  write_csv(limit_curve(model.spec, a.u_nodes), out.open("limits.csv"));
  out.open("report.json") << to_json(report).dump(2) << '\n';
  if (a.limit_paths > 0) {
    auto& csv = out.open("limit_paths.csv");
    csv << "path,u";
    for (std::size_t k = 1; k <= model.spec.p; ++k) csv << ",X_" << k;
    csv << '\n';
    for (std::size_t r = 0; r < a.limit_paths; ++r) {
      const auto path = sample_limit_path(model.spec, replication_seed(a.seed, r), a.path_steps);
      for (std::size_t i = 0; i < path.u.size(); ++i) {
        csv << r << ',' << format_double(path.u[i]);
        for (Eigen::Index k = 0; k < path.x[i].size(); ++k) csv << ',' << format_double(path.x[i](k));
        csv << '\n';
      }
    }
  }
  const auto last = report.u.size() - 1;
  json var = json::array();
  for (Eigen::Index k = 0; k < report.empirical_cov[last].rows(); ++k)
    var.push_back({{"empirical", report.empirical_cov[last](k, k)},
                   {"theory", report.theory_cov[last](k, k)},
                   {"skewness", report.skewness[last](k)},
                   {"ks_pvalue", report.ks_pvalue[last](k)}});
  std::cout << json{{"u", report.u[last]}, {"components", var}}.dump() << '\n';
  finish(out, "clt", a, &model,
         {{"replications", opts.replications}, {"u_nodes", a.u_nodes}, {"generator", a.generator},
          {"centering", a.centering}, {"limit_paths", a.limit_paths}, {"path_steps", a.path_steps}},
         seconds_since(start));
  return kExitOk;
}

PriceModelParams price_params(const Args& a, const Resolved* model) {
  PriceModelParams p;
  if (model != nullptr && model->preset != nullptr && model->preset->price) p = *model->preset->price;
  if (a.mu0) p.mu0 = *a.mu0;
  if (a.delta_mu) p.delta_mu = *a.delta_mu;
  if (a.alpha0) p.alpha0 = *a.alpha0;
  if (a.eta) p.eta = *a.eta;
  if (a.beta) p.beta = *a.beta;
  if (a.horizon) p.horizon = *a.horizon;
  return p;
}

int cmd_slippage(const Args& a) {
  const auto start = std::chrono::steady_clock::now();
  Resolved model;
  const Preset* preset = nullptr;
  if (!a.preset.empty()) {
    preset = &find_preset(a.preset);
    if (!preset->price) throw CLI::ValidationError("preset " + a.preset + " is not a price model");
  }
  model.preset = preset;
  const auto params = price_params(a, &model);
  model.spec = build_price_spec(params);
  const auto u = unit_grid(a.u_nodes);

  OutputSet out(a.out);
  auto& csv = out.open("slippage.csv");
  csv << "u,alpha,expected_return,slippage_ratio,volatility\n";
  for (double x : u)
    csv << format_double(x) << ',' << format_double(reproduction_rate(params, x)) << ','
        << format_double(expected_return_limit(params, x)) << ','
        << format_double(slippage_ratio(params, x)) << ',' << format_double(limit_volatility(params, x))
        << '\n';
  std::cout << "zeta0 = " << fixed(zeta0(params)) << "\n";
  std::cout << "u    alpha   expected_return  slippage_ratio  volatility\n";
  for (int i = 0; i <= 10; ++i) {
    const double x = i / 10.0;
    std::cout << fixed(x, 1) << "  " << fixed(reproduction_rate(params, x), 4) << "  "
              << fixed(expected_return_limit(params, x), 4) << "           "
              << fixed(slippage_ratio(params, x), 4) << "          "
              << fixed(limit_volatility(params, x), 4) << '\n';
  }
  json manifest_params = {{"mu0", params.mu0},     {"delta_mu", params.delta_mu},
                          {"alpha0", params.alpha0}, {"eta", params.eta},
                          {"beta", params.beta},   {"horizon", params.horizon},
                          {"u_nodes", a.u_nodes}};
  const std::size_t n = a.n ? *a.n : 0;
  if (n > 0) {
    SlippageOptions o;
    o.mc.replications = n;
    o.mc.seed = a.seed;
    o.mc.u_nodes = a.u_nodes;
    o.mc.threads = resolve_threads(a.threads);
    o.mc.generator = parse_generator(a.generator);
    o.bootstrap = a.bootstrap;
    o.confidence = a.confidence;
    const auto rep = mc_slippage(params, o);
    write_alpha_csv(rep, out.open("fig2_alpha.csv"));
    write_return_csv(rep, out.open("fig2_return.csv"));
    write_slippage_csv(rep, out.open("fig2_slippage.csv"));
    out.open("report.json") << to_json(rep).dump(2) << '\n';
    const auto last = rep.u.size() - 1;
    std::cout << "monte carlo ratio at u = 1: " << fixed(rep.empirical_ratio[last]) << " ["
              << fixed(rep.ratio_lo[last]) << ", " << fixed(rep.ratio_hi[last]) << "]\n";
    manifest_params["replications"] = n;
    manifest_params["bootstrap"] = a.bootstrap;
    manifest_params["confidence"] = a.confidence;
    manifest_params["generator"] = a.generator;
  }
  finish(out, "slippage", a, &model, manifest_params, seconds_since(start));
  return kExitOk;
}

int cmd_cesaro(const Args& a) {
  const auto start = std::chrono::steady_clock::now();
  const auto model = resolve_spec(a);
  validate_spec(model.spec);
  const std::vector<ScalarCurve> m(model.spec.p, ScalarCurve::constant(1.0));
  const auto points = cesaro_check(model.spec, m, a.u, a.horizons, a.step);
  OutputSet out(a.out);
  auto& csv = out.open("cesaro.csv");
  csv << "horizon,error,error_sqrt_horizon";
  for (std::size_t k = 1; k <= model.spec.p; ++k) csv << ",lhs_" << k << ",rhs_" << k;
  csv << '\n';
  for (const auto& pt : points) {
    csv << format_double(pt.horizon) << ',' << format_double(pt.error) << ','
        << format_double(pt.error_sqrt_horizon);
    for (Eigen::Index k = 0; k < pt.lhs.size(); ++k)
      csv << ',' << format_double(pt.lhs(k)) << ',' << format_double(pt.rhs(k));
    csv << '\n';
    std::cout << "T = " << fixed(pt.horizon, 0) << "  error = " << format_double(pt.error)
              << "  error*sqrt(T) = " << format_double(pt.error_sqrt_horizon) << '\n';
  }
  finish(out, "cesaro", a, &model,
         {{"u", a.u}, {"horizons", a.horizons}, {"step", a.step}, {"m", "constant 1"}},
         seconds_since(start));
  return kExitOk;
}

// ---------------------------------------------------------------------------

void add_model_options(CLI::App* sub, Args& a) {
  sub->add_option("--spec", a.spec_path, "Model specification JSON file");
  sub->add_option("--preset", a.preset, "Built-in model (see --help of the root command)");
  sub->add_option("--horizon", a.horizon, "Override the horizon T");
}

void add_common(CLI::App* sub, Args& a, bool outputs, bool seeded) {
  sub->add_option("--config", a.config, "JSON config; keys are long option names");
  if (outputs) sub->add_option("--out", a.out, "Output directory")->capture_default_str();
  if (seeded) sub->add_option("--seed", a.seed, "Master seed")->capture_default_str();
  sub->add_option("--threads", a.threads, "Worker cap (default: HAWKES_LS_THREADS, else all cores)");
}

/// Config keys fill options not given on the command line.
void apply_config(CLI::App* sub, Args& a) {
  if (a.config.empty()) return;
  std::ifstream in(a.config);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + a.config);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CLI::ValidationError("--config", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw CLI::ValidationError("--config", "top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config") throw CLI::ValidationError("--config", "config files cannot nest");
    if (name == "spec" && value.is_object()) {
      if (sub->get_option_no_throw("--spec") == nullptr)
        throw CLI::ValidationError("--config", "unknown key \"spec\" for " + sub->get_name());
      if (sub->get_option("--spec")->count() == 0) a.inline_spec = value;
      continue;
    }
    CLI::Option* opt = sub->get_option_no_throw("--" + name);
    if (opt == nullptr)
      throw CLI::ValidationError("--config", "unknown key \"" + key + "\" for " + sub->get_name());
    if (opt->count() > 0) continue;
    auto text = [&](const json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
      if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
      if (v.is_number()) return format_double(v.get<double>());
      throw CLI::ValidationError("--config", "bad value type for \"" + key + "\"");
    };
    if (value.is_array()) {
      for (const auto& v : value) opt->add_result(text(v));
    } else {
      opt->add_result(text(value));
    }
    opt->run_callback();
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const Unstable*>(&e) || dynamic_cast<const InvalidCurve*>(&e) ||
      dynamic_cast<const InvalidKernel*>(&e) || dynamic_cast<const SingularMatrix*>(&e) ||
      dynamic_cast<const CenteringUnavailable*>(&e) || dynamic_cast<const NotExponential*>(&e))
    return kExitModel;
  if (dynamic_cast<const RuntimeBudgetExceeded*>(&e) || dynamic_cast<const QuadratureFailure*>(&e))
    return kExitBudget;
  return kExitUsage;
}

std::string preset_list() {
  std::string s = "Presets:\n";
  for (const auto& p : presets()) s += "  " + p.name + ": " + p.description + "\n";
  return s;
}

}  // namespace

int run_cli(int argc, char** argv) {
  Args a;
  CLI::App app{"Simulation and limit theorems for locally stationary Hawkes processes", "hawkes_ls"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.footer(preset_list());

  auto* validate = app.add_subcommand("validate", "Stability summary of a model (exit 2 if unstable)");
  add_model_options(validate, a);
  validate->add_option("--config", a.config, "JSON config; keys are long option names");

  auto* sim = app.add_subcommand("simulate", "Simulate one path and write its event log");
  add_model_options(sim, a);
  add_common(sim, a, true, true);
  sim->add_option("--generator", a.generator, "thinning or exp-fast")->capture_default_str();
  sim->add_option("--format", a.format, "csv or binary")->capture_default_str();

  auto* inten = app.add_subcommand("intensity", "Intensity on a grid for a simulated or given log");
  add_model_options(inten, a);
  add_common(inten, a, true, true);
  inten->add_option("--events", a.events, "Event log (CSV or binary); simulated when absent");
  inten->add_option("--points", a.points, "Grid points on [0, T]")->capture_default_str();
  inten->add_flag("--residuals", a.residuals, "Also write time-rescaled residual KS statistics");

  auto* res = app.add_subcommand("resolvent", "Resolvent quadratures and checks");
  add_model_options(res, a);
  add_common(res, a, true, false);
  res->add_flag("--check-exp", a.check_exp, "Exponential-kernel resolvent against its closed form");
  res->add_option("--what", a.what, "mean, gamma, triangle or domination")->capture_default_str();
  res->add_option("--step", a.step, "Grid step h")->capture_default_str();
  res->add_option("--x-nodes", a.x_nodes, "x-grid size for --what gamma")->capture_default_str();

  auto* lln = app.add_subcommand("lln", "Monte-Carlo mean path against the LLN limit");
  add_model_options(lln, a);
  add_common(lln, a, true, true);
  lln->add_option("--n", a.n, "Replications (default: the preset's, else 500)");
  lln->add_option("--u-nodes", a.u_nodes, "Equispaced u-nodes on [0, 1]")->capture_default_str();
  lln->add_option("--generator", a.generator, "thinning or exp-fast")->capture_default_str();
  lln->add_option("--band", a.band, "Band half-width in standard errors")->capture_default_str();

  auto* clt = app.add_subcommand("clt", "Monte-Carlo fluctuations against the CLT covariance");
  add_model_options(clt, a);
  add_common(clt, a, true, true);
  clt->add_option("--n", a.n, "Replications (default: the preset's, else 500)");
  clt->add_option("--u-nodes", a.u_nodes, "Equispaced u-nodes on [0, 1]")->capture_default_str();
  clt->add_option("--generator", a.generator, "thinning or exp-fast")->capture_default_str();
  clt->add_option("--centering", a.centering, "expectation or lln")->capture_default_str();
  clt->add_option("--limit-paths", a.limit_paths, "Sampled paths of the limit diffusion")->capture_default_str();
  clt->add_option("--path-steps", a.path_steps, "Euler steps per limit path")->capture_default_str();

  auto* slip = app.add_subcommand("slippage", "Expected return and slippage of the price model");
  slip->add_option("--preset", a.preset, "fig2-* preset");
  add_common(slip, a, true, true);
  slip->add_option("--mu0", a.mu0, "Symmetric baseline (default 1)");
  slip->add_option("--delta-mu", a.delta_mu, "Directional flow (default 0.5)");
  slip->add_option("--alpha0", a.alpha0, "Initial reproduction rate (default 0.5)");
  slip->add_option("--eta", a.eta, "Liquidity decay strength (default 0.9)");
  slip->add_option("--beta", a.beta, "Kernel decay (default 1)");
  slip->add_option("--horizon", a.horizon, "Horizon T (default 200)");
  slip->add_option("--u-nodes", a.u_nodes, "Equispaced u-nodes on [0, 1]")->capture_default_str();
  slip->add_option("--n", a.n, "Paired replications; 0 skips the simulation");
  slip->add_option("--generator", a.generator, "thinning or exp-fast")->capture_default_str();
  slip->add_option("--bootstrap", a.bootstrap, "Bootstrap resamples")->capture_default_str();
  slip->add_option("--confidence", a.confidence, "Bootstrap interval level")->capture_default_str();

  auto* ces = app.add_subcommand("cesaro", "Cesaro functional of the resolvent against its limit (m = 1)");
  add_model_options(ces, a);
  add_common(ces, a, true, false);
  ces->add_option("--u", a.u, "Upper limit u in [0, 1]")->capture_default_str();
  ces->add_option("--horizons", a.horizons, "Increasing horizons T")->delimiter(',')->capture_default_str();
  ces->add_option("--step", a.step, "Grid step h")->capture_default_str();

  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    apply_config(sub, a);
    const std::string name = sub->get_name();
    if (name == "validate") return cmd_validate(a);
    if (name == "simulate") return cmd_simulate(a);
    if (name == "intensity") return cmd_intensity(a);
    if (name == "resolvent") return cmd_resolvent(a);
    if (name == "lln") return cmd_lln(a);
    if (name == "clt") return cmd_clt(a);
    if (name == "slippage") return cmd_slippage(a);
    return cmd_cesaro(a);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("hawkes_ls");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace hawkes_ls::cli
