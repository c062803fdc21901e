#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskgov/errors.hpp"
#include "riskgov/governance.hpp"
#include "riskgov/params.hpp"
#include "riskgov/schedule.hpp"

namespace riskgov {

// A scenario file is a JSON document; it is the single source of truth for an
// experiment. Key names are documented in the README. Schedules accept either
// a bare number (constant) or {"breakpoints": [...], "values": [...]}.
struct ScenarioConfig {
  nlohmann::json raw;  // resolved document, recorded in output headers

  ModelParams params;
  double phi0 = 0.0;
  double psi0 = 0.0;
  std::optional<ControlWeights> weights;
  std::optional<double> fixed_alpha;  // fixed-rate runs (loss distributions)
  std::optional<double> fixed_gamma;
  bool has_governance = false;
  double s1 = 0.0, s2 = 0.0;
  double horizon = 3.0, decision_step = 0.25, window = 1.0;
  StrategySet strategy_set = StrategySet::raise_assets_lower_assets;
  int n_inner = 2000;
  double baseline_alpha = 10.0, baseline_gamma = 10.0;
  double window_t0 = 0.0, window_t1 = 1.0;  // loss-distribution window
  int n_paths = 10000;
  double dt = 1e-3;
  int riccati_steps = 10000;
  std::uint64_t seed = 0;

  GovernanceScenario governance() const {
    if (!has_governance)
      throw parse_error("scenario: missing 'governance' section");
    if (!weights) throw parse_error("scenario: missing 'weights' section");
    GovernanceScenario sc;
    sc.params = params;
    sc.weights = *weights;
    sc.phi0 = phi0;
    sc.psi0 = psi0;
    sc.s1 = s1;
    sc.s2 = s2;
    sc.horizon = horizon;
    sc.decision_step = decision_step;
    sc.window = window;
    sc.strategy_set = strategy_set;
    sc.n_inner = n_inner;
    sc.dt = dt;
    sc.riccati_steps = riccati_steps;
    sc.seed = seed;
    sc.baseline_alpha = baseline_alpha;
    sc.baseline_gamma = baseline_gamma;
    return sc;
  }

  CooperationRates fixed_rates(double t0, double t1) const {
    if (!fixed_alpha || !fixed_gamma)
      throw parse_error("scenario: missing 'rates' section (alpha/gamma)");
    return CooperationRates::constant(t0, t1, *fixed_alpha, *fixed_gamma);
  }
};

namespace scenario_detail {

using nlohmann::json;

template <class T>
T require(const json& j, const std::string& section, const char* key) {
  if (!j.contains(key))
    throw parse_error("scenario: missing key '" + section + "." + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw parse_error("scenario: bad value for '" + section + "." + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw parse_error(std::string("scenario: bad value for '") + key + "': " + e.what());
  }
}

inline Schedule parse_schedule(const json& j, const std::string& name) {
  if (j.is_number()) return Schedule::constant(0.0, j.get<double>());
  if (j.is_object()) {
    Schedule s;
    s.breakpoints = require<std::vector<double>>(j, name, "breakpoints");
    s.values = require<std::vector<double>>(j, name, "values");
    return s;
  }
  throw parse_error("scenario: '" + name + "' must be a number or {breakpoints, values}");
}

}  // namespace scenario_detail

inline nlohmann::json load_scenario_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open scenario file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error("scenario '" + path + "': " + e.what());
  }
}

// Applies one "dotted.path=value" override; the value is parsed as JSON when
// possible and taken as a string otherwise.
inline void apply_override(nlohmann::json& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw parse_error("override '" + spec + "' is not of the form key.path=value");
  std::string pointer = "/";
  for (char ch : spec.substr(0, eq)) pointer += ch == '.' ? '/' : ch;
  nlohmann::json value;
  const std::string rhs = spec.substr(eq + 1);
  try {
    value = nlohmann::json::parse(rhs);
  } catch (const nlohmann::json::parse_error&) {
    value = rhs;
  }
  try {
    doc[nlohmann::json::json_pointer(pointer)] = value;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("override '" + spec + "': " + e.what());
  }
}

namespace scenario_detail {

inline ScenarioConfig parse_scenario_impl(const nlohmann::json& doc) {
  ScenarioConfig cfg;
  cfg.raw = doc;
  if (!doc.contains("model")) throw parse_error("scenario: missing 'model' section");
  const json& m = doc.at("model");
  cfg.params.n_banks = require<int>(m, "model", "n_banks");
  cfg.params.mu_a = require<double>(m, "model", "mu_a");
  cfg.params.mu_l = require<double>(m, "model", "mu_l");
  cfg.params.a0 = require<double>(m, "model", "a0");
  cfg.params.l0 = require<double>(m, "model", "l0");
  cfg.params.default_level = get_or<double>(m, "default_level", 0.0);
  if (!m.contains("sigma_a") || !m.contains("sigma_l"))
    throw parse_error("scenario: model needs sigma_a and sigma_l");
  cfg.params.sigma_a = parse_schedule(m.at("sigma_a"), "model.sigma_a");
  cfg.params.sigma_l = parse_schedule(m.at("sigma_l"), "model.sigma_l");
  cfg.params.rho_a = m.contains("rho_a") ? parse_schedule(m.at("rho_a"), "model.rho_a")
                                         : Schedule::constant(0.0, 0.0);
  cfg.params.rho_l = m.contains("rho_l") ? parse_schedule(m.at("rho_l"), "model.rho_l")
                                         : Schedule::constant(0.0, 0.0);
  cfg.params.validate();

  cfg.phi0 = cfg.params.a0;
  cfg.psi0 = cfg.params.l0;
  if (doc.contains("ideal")) {
    const json& ideal = doc.at("ideal");
    cfg.phi0 = get_or<double>(ideal, "phi0", cfg.phi0);
    cfg.psi0 = get_or<double>(ideal, "psi0", cfg.psi0);
  }

  if (doc.contains("weights")) {
    const json& w = doc.at("weights");
    ControlWeights cw;
    cw.lambda1 = require<double>(w, "weights", "lambda1");
    cw.lambda2 = require<double>(w, "weights", "lambda2");
    cw.lambda3 = require<double>(w, "weights", "lambda3");
    cw.lambda4 = require<double>(w, "weights", "lambda4");
    cw.validate();
    cfg.weights = cw;
  }

  if (doc.contains("rates")) {
    const json& r = doc.at("rates");
    cfg.fixed_alpha = require<double>(r, "rates", "alpha");
    cfg.fixed_gamma = require<double>(r, "rates", "gamma");
    if (*cfg.fixed_alpha < 0.0 || *cfg.fixed_gamma < 0.0)
      throw infeasible_error("scenario: fixed rates must be >= 0");
  }

  if (doc.contains("governance")) {
    cfg.has_governance = true;
    const json& g = doc.at("governance");
    cfg.s1 = require<double>(g, "governance", "s1");
    cfg.s2 = require<double>(g, "governance", "s2");
    cfg.horizon = get_or<double>(g, "horizon", 3.0);
    cfg.decision_step = get_or<double>(g, "decision_step", 0.25);
    cfg.window = get_or<double>(g, "window", 1.0);
    cfg.strategy_set = parse_strategy_set(get_or<std::string>(g, "strategy_set", "1a,2a,3"));
    cfg.n_inner = get_or<int>(g, "n_inner", 2000);
    cfg.baseline_alpha = get_or<double>(g, "baseline_alpha", 10.0);
    cfg.baseline_gamma = get_or<double>(g, "baseline_gamma", 10.0);
  }

  if (doc.contains("window")) {
    const auto w = doc.at("window").get<std::vector<double>>();
    if (w.size() != 2 || !(w[0] < w[1]))
      throw parse_error("scenario: 'window' must be [t0, t1] with t0 < t1");
    cfg.window_t0 = w[0];
    cfg.window_t1 = w[1];
  }

  if (doc.contains("mc")) {
    const json& mc = doc.at("mc");
    cfg.n_paths = get_or<int>(mc, "n_paths", cfg.n_paths);
    cfg.dt = get_or<double>(mc, "dt", cfg.dt);
    cfg.riccati_steps = get_or<int>(mc, "riccati_steps", cfg.riccati_steps);
  }
  if (cfg.n_paths < 0 || !(cfg.dt > 0.0))
    throw infeasible_error("scenario: mc.n_paths must be >= 0 and mc.dt > 0");
  cfg.seed = get_or<std::uint64_t>(doc, "seed", 0);
  return cfg;
}

}  // namespace scenario_detail

// Wrong shapes and types surface as parse errors, never as raw library
// exceptions.
inline ScenarioConfig parse_scenario(const nlohmann::json& doc) {
  try {
    return scenario_detail::parse_scenario_impl(doc);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("scenario: ") + e.what());
  }
}

inline ScenarioConfig load_scenario(const std::string& path,
                                    const std::vector<std::string>& overrides = {}) {
  nlohmann::json doc = load_scenario_json(path);
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_scenario(doc);
}

}  // namespace riskgov
