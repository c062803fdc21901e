#include <cstdio>
#include <fstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "riskgov/scenario.hpp"

using namespace riskgov;
using Catch::Approx;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& body) {
    path = std::string(std::tmpnam(nullptr)) + ".json";
    std::ofstream(path) << body;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kFull = R"({
  "model": {
    "n_banks": 10, "mu_a": 0.1, "mu_l": 0.1,
    "a0": 0.6, "l0": 0.4,
    "sigma_a": {"breakpoints": [0.0, 0.2, 0.5], "values": [0.3, 0.8, 0.3]},
    "sigma_l": 0.3,
    "rho_a": {"breakpoints": [0.0, 0.2, 0.5], "values": [0.0, 0.5, 0.0]},
    "rho_l": 0.0
  },
  "weights": {"lambda1": 0.1, "lambda2": 0.1, "lambda3": 0.1, "lambda4": 0.1},
  "governance": {"s1": 0.01, "s2": 0.05, "strategy_set": "1a,2b,3", "n_inner": 500},
  "rates": {"alpha": 10.0, "gamma": 10.0},
  "window": [0.0, 1.0],
  "mc": {"n_paths": 2000, "dt": 0.001},
  "seed": 99
})";

}  // namespace

TEST_CASE("full scenario round trip") {
  TempFile f(kFull);
  const auto cfg = load_scenario(f.path);
  CHECK(cfg.params.n_banks == 10);
  CHECK(eval_schedule(cfg.params.sigma_a, 0.3) == 0.8);
  CHECK(eval_schedule(cfg.params.sigma_a, 0.7) == 0.3);
  CHECK(eval_schedule(cfg.params.rho_a, 0.25) == 0.5);
  CHECK(cfg.phi0 == 0.6);  // defaults to a0/l0
  CHECK(cfg.psi0 == 0.4);
  CHECK(cfg.seed == 99);
  CHECK(cfg.n_paths == 2000);
  REQUIRE(cfg.weights.has_value());
  CHECK(cfg.weights->lambda3 == 0.1);
  CHECK(cfg.has_governance);
  const auto sc = cfg.governance();
  CHECK(sc.strategy_set == StrategySet::raise_assets_lower_liabilities);
  CHECK(sc.n_inner == 500);
  CHECK(sc.n_quarters() == 9);
  sc.validate();
  const auto rates = cfg.fixed_rates(0.0, 1.0);
  CHECK(rates.eval(0.5).alpha == 10.0);
}

TEST_CASE("missing keys produce pointed parse errors") {
  TempFile f(R"({"model": {"n_banks": 10}})");
  try {
    load_scenario(f.path);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(std::string(e.what()).find("model.mu_a") != std::string::npos);
  }
}

TEST_CASE("malformed JSON reports position") {
  TempFile f("{ not json ");
  CHECK_THROWS_AS(load_scenario(f.path), parse_error);
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), parse_error);
}

TEST_CASE("infeasible models are rejected after parsing") {
  TempFile f(R"({
    "model": {"n_banks": 10, "mu_a": 0.1, "mu_l": 0.1, "a0": 0.4, "l0": 0.6,
              "sigma_a": 0.3, "sigma_l": 0.3}
  })");
  CHECK_THROWS_AS(load_scenario(f.path), infeasible_error);
}

TEST_CASE("overrides rewrite scalars, schedules and strings") {
  TempFile f(kFull);
  const auto cfg = load_scenario(
      f.path, {"model.mu_a=0.25", "seed=123",
               "model.sigma_l={\"breakpoints\":[0.0,0.5],\"values\":[0.2,0.9]}",
               "governance.strategy_set=1b,2b,3"});
  CHECK(cfg.params.mu_a == 0.25);
  CHECK(cfg.seed == 123);
  CHECK(eval_schedule(cfg.params.sigma_l, 0.75) == 0.9);
  CHECK(cfg.governance().strategy_set == StrategySet::lower_liabilities_both);
  // overrides land in the resolved document
  CHECK(cfg.raw.at("model").at("mu_a") == 0.25);
}

TEST_CASE("bad override shapes are parse errors") {
  TempFile f(kFull);
  CHECK_THROWS_AS(load_scenario(f.path, {"no-equals-sign"}), parse_error);
  CHECK_THROWS_AS(load_scenario(f.path, {"=5"}), parse_error);
}

TEST_CASE("unknown strategy set is rejected") {
  TempFile f(kFull);
  CHECK_THROWS_AS(load_scenario(f.path, {"governance.strategy_set=2c"}), parse_error);
}

TEST_CASE("shipped scenario files parse and validate") {
  for (const char* name :
       {"fig1", "fig2", "fig3", "fig4", "fig5", "smoke"}) {
    const auto cfg = load_scenario(std::string(SCENARIO_DIR "/") + name + ".json");
    CHECK(cfg.fixed_alpha.has_value());
    CHECK(cfg.params.n_banks == 10);
  }
  for (const char* name : {"table1_exp1", "table1_exp2", "table1_exp3", "table1_exp4",
                           "table1_exp5", "table1_exp6", "table1_exp1_psi02"}) {
    const auto cfg = load_scenario(std::string(SCENARIO_DIR "/") + name + ".json");
    CHECK(cfg.has_governance);
    cfg.governance().validate();
  }
}
