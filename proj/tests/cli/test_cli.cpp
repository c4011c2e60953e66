#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using hawkes_ls::cli::run_cli;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  Run r;
  r.code = run_cli(args);
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Scratch directory removed on scope exit.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("hawkes_ls_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& leaf) const { return (dir / leaf).string(); }
  void write(const std::string& leaf, const std::string& text) const {
    std::ofstream(dir / leaf) << text;
  }
};

const char* kUnstablePrice = R"({"schema":"hawkes-ls/spec-v1","p":2,"horizon":100,
  "baseline":[{"type":"constant","c":1.5},{"type":"constant","c":1}],
  "reproduction":{"type":"quadratic_decay","alpha0":1.0,"eta":0.9},
  "kernel":[[{"type":"exponential","alpha":0,"beta":1},{"type":"exponential","alpha":1,"beta":1}],
            [{"type":"exponential","alpha":1,"beta":1},{"type":"exponential","alpha":0,"beta":1}]]})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate exit codes") {
    Scratch s("validate");
    const auto ok = run({"validate", "--preset", "fig1-gaussian"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("\"spectral_radius\": 0.8") != std::string::npos);

    s.write("unstable.json", kUnstablePrice);
    const auto bad = run({"validate", "--spec", s.path("unstable.json")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("Unstable") != std::string::npos);

    s.write("broken.json", "{\"schema\": ");
    const auto broken = run({"validate", "--spec", s.path("broken.json")});
    CHECK(broken.code == 1);
    CHECK(broken.err.find("parse error") != std::string::npos);

    CHECK(run({"validate"}).code == 1);
    CHECK(run({"validate", "--preset", "nope"}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"validate", "-p", "fig1-gaussian"}).code == 1);
  }

  TEST_CASE("slippage table") {
    Scratch s("slippage");
    const auto r = run({"slippage", "--alpha0", "0.5", "--eta", "0.9", "--out", s.path("o")});
    CHECK(r.code == 0);
    const auto last = r.out.substr(r.out.rfind("1.0  "));
    CHECK(last.find("1.1231") != std::string::npos);
    CHECK(fs::exists(s.path("o/slippage.csv")));
    CHECK(fs::exists(s.path("o/manifest.json")));
    CHECK(run({"slippage", "--alpha0", "1.0", "--out", s.path("bad")}).code == 2);
    CHECK(!fs::exists(s.path("bad")));
  }

  TEST_CASE("exponential resolvent check") {
    const auto r = run({"resolvent", "--check-exp"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"pass\":true") != std::string::npos);
  }

  TEST_CASE("config file") {
    Scratch s("config");
    s.write("cfg.json", R"({"preset": "fig1-linear", "n": 6, "u_nodes": 5, "seed": 3, "horizon": 20})");
    CHECK(run({"lln", "--config", s.path("cfg.json"), "--out", s.path("a")}).code == 0);
    // Command-line values win over the file.
    CHECK(run({"lln", "--config", s.path("cfg.json"), "--seed", "4", "--out", s.path("b")}).code == 0);
    CHECK(slurp(s.path("a/lln.csv")) != slurp(s.path("b/lln.csv")));
    const auto manifest = slurp(s.path("a/manifest.json"));
    CHECK(manifest.find("\"seed\": 3") != std::string::npos);

    s.write("inline.json", std::string(R"({"spec": )") + kUnstablePrice + "}");
    CHECK(run({"validate", "--config", s.path("inline.json")}).code == 2);

    s.write("unknown.json", R"({"preset": "fig1-linear", "bogus": 1})");
    const auto unknown = run({"lln", "--config", s.path("unknown.json")});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("bogus") != std::string::npos);

    s.write("typed.json", R"({"preset": "fig1-linear", "n": "many"})");
    CHECK(run({"lln", "--config", s.path("typed.json"), "--out", s.path("c")}).code == 1);
  }

  TEST_CASE("data files do not depend on the thread count") {
    Scratch s("threads");
    const std::vector<std::string> base = {"clt", "--preset", "clt-antidiagonal", "--horizon", "30",
                                           "--n", "12", "--u-nodes", "6", "--seed", "5",
                                           "--limit-paths", "2", "--path-steps", "20"};
    auto one = base;
    one.insert(one.end(), {"--threads", "1", "--out", s.path("one")});
    auto many = base;
    many.insert(many.end(), {"--threads", "8", "--out", s.path("many")});
    REQUIRE(run(one).code == 0);
    REQUIRE(run(many).code == 0);
    for (const char* f : {"clt.csv", "limits.csv", "report.json", "limit_paths.csv"})
      CHECK(slurp(s.path(std::string("one/") + f)) == slurp(s.path(std::string("many/") + f)));
  }

  TEST_CASE("failures leave no partial output") {
    Scratch s("partial");
    // The limit-path sampler rejects zero steps after the other tables are open.
    const auto r = run({"clt", "--preset", "clt-univariate", "--horizon", "10", "--n", "3",
                        "--u-nodes", "3", "--limit-paths", "1", "--path-steps", "0", "--out",
                        s.path("o")});
    CHECK(r.code == 1);
    CHECK(!fs::exists(s.path("o")));
  }

  TEST_CASE("simulate, intensity and residuals") {
    Scratch s("sim");
    REQUIRE(run({"simulate", "--preset", "fig1-gaussian", "--horizon", "50", "--seed", "1",
                 "--format", "binary", "--out", s.path("sim")})
                .code == 0);
    const auto r = run({"intensity", "--preset", "fig1-gaussian", "--horizon", "50", "--events",
                        s.path("sim/events.bin"), "--points", "11", "--residuals", "--out",
                        s.path("int")});
    CHECK(r.code == 0);
    CHECK(r.out.find("ks_pvalue") != std::string::npos);
    CHECK(slurp(s.path("int/intensity.csv")).rfind("t,lambda_1\n0,1\n", 0) == 0);
    CHECK(run({"intensity", "--preset", "clt-antidiagonal", "--events", s.path("sim/events.bin"),
               "--out", s.path("x")})
              .code == 1);
  }

  TEST_CASE("cesaro and resolvent tables") {
    Scratch s("ces");
    CHECK(run({"cesaro", "--preset", "fig1-linear", "--horizons", "10,20", "--step", "0.1", "--out",
               s.path("c")})
              .code == 0);
    const auto table = slurp(s.path("c/cesaro.csv"));
    CHECK(table.rfind("horizon,error,error_sqrt_horizon,lhs_1,rhs_1\n10,", 0) == 0);
    CHECK(run({"resolvent", "--preset", "fig1-linear", "--horizon", "10", "--what", "domination",
               "--step", "0.1", "--out", s.path("d")})
              .code == 0);
    CHECK(run({"resolvent", "--preset", "fig1-linear", "--what", "nothing", "--out", s.path("e")})
              .code == 1);
  }
}
