#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "riskgov/scenario.hpp"
#include "riskgov/selfcheck.hpp"
#include "riskgov/table_io.hpp"

namespace riskgov {

// Exit status contract of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParseError = 2,
  kInfeasible = 3,
  kBlowup = 4,
  kValidationFailed = 5,
};

struct RunManifest {
  std::string scenario_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;  // dotted.path=value
  std::optional<std::uint64_t> seed;
  std::optional<int> n_paths;
  std::optional<double> dt;
  int threads = 0;
  int seeds = 1;           // govern: number of master seeds to sweep
  bool baseline = false;   // govern: also run the no-governance reference
  int dump_paths = 0;      // loss-dist: trajectory dump
  int dump_stride = 100;
};

namespace runner_detail {

inline ScenarioConfig load(const RunManifest& m) {
  nlohmann::json doc = load_scenario_json(m.scenario_path);
  for (const auto& o : m.overrides) apply_override(doc, o);
  // flag shorthands become part of the resolved document, so output headers
  // stay self-contained
  if (m.seed) doc["seed"] = *m.seed;
  if (m.n_paths) doc["mc"]["n_paths"] = *m.n_paths;
  if (m.dt) doc["mc"]["dt"] = *m.dt;
  return parse_scenario(doc);
}

inline std::string out_path(const RunManifest& m, const std::string& name) {
  std::filesystem::create_directories(m.out_dir);
  return (std::filesystem::path(m.out_dir) / name).string();
}

inline void write_histogram(const RunManifest& m, const std::string& name,
                            const ScenarioConfig& cfg, const LossDistribution& dist) {
  TableWriter t(out_path(m, name), {"k", "count", "probability"}, cfg.raw, cfg.seed);
  const auto probs = dist.probabilities();
  for (std::size_t k = 0; k < dist.counts.size(); ++k)
    t.row(k, dist.counts[k], probs[k]);
}

inline void write_trajectories(const RunManifest& m, const std::string& name,
                               const ScenarioConfig& cfg, const PathEnsemble& ens) {
  TableWriter t(out_path(m, name),
                {"path", "t", "bank", "log_assets", "log_liabilities", "reserves"}, cfg.raw,
                cfg.seed);
  for (const auto& r : ens.trajectories)
    t.row(r.path, r.t, r.bank, r.log_assets, r.log_liabilities,
          std::exp(r.log_assets) - std::exp(r.log_liabilities));
}

inline void write_pmf_trajectories(const std::string& path, const nlohmann::json& config,
                                   std::uint64_t seed, const PmfEnsemble& ens,
                                   const IdealBankPath& ideal) {
  TableWriter t(path, {"path", "t", "Z", "S", "Y"}, config, seed);
  for (const auto& r : ens.trajectories)
    t.row(r.path, r.t, r.Z, r.S, pmf_reserves(ideal, r.t, r.Z, r.S));
}

inline void write_decisions(const RunManifest& m, const std::string& name,
                            const ScenarioConfig& cfg, const GovernanceRecord& rec) {
  TableWriter t(out_path(m, name),
                {"j", "n_a", "n_l", "eta", "std_error", "mean_alpha", "mean_gamma", "cost",
                 "satisfied"},
                cfg.raw, cfg.seed);
  for (const auto& d : rec.decisions)
    t.row(d.j, d.n_a, d.n_l, d.eta.probability, d.eta.standard_error, d.mean_alpha,
          d.mean_gamma, d.cost, d.satisfied);
}

inline void write_indices(const RunManifest& m, const std::string& name,
                          const ScenarioConfig& cfg, const GovernanceRecord& rec,
                          std::uint64_t seed) {
  TableWriter t(out_path(m, name), {"seed", "n_sr", "c_cost", "c_alpha", "c_gamma", "truncated"},
                cfg.raw, cfg.seed);
  t.row(seed, rec.indices.n_sr, rec.indices.c_cost, rec.indices.c_alpha, rec.indices.c_gamma,
        rec.truncated);
}

}  // namespace runner_detail

// Coupled vs uncoupled loss distributions over the scenario window, with the
// same noise feeding both variants.
inline void run_loss_dist(const RunManifest& m) {
  using namespace runner_detail;
  const ScenarioConfig cfg = load(m);
  const double t0 = cfg.window_t0, t1 = cfg.window_t1;
  const auto rates = cfg.fixed_rates(t0, t1);
  const auto ideal = IdealBankPath::constant(t0, t1, cfg.phi0, cfg.psi0);
  const auto init = SystemState::initial(cfg.params, t0);
  SimOptions opts;
  opts.threads = m.threads;
  opts.dump_paths = m.dump_paths;
  opts.dump_stride = m.dump_stride;

  const auto coupled = simulate(cfg.params, rates, ideal, t0, t1, init, cfg.n_paths, cfg.dt,
                                cfg.seed, StreamDomain::loss_dist, 0, opts);
  const auto uncoupled = simulate_gbm(cfg.params, t0, t1, init, cfg.n_paths, cfg.dt, cfg.seed,
                                      StreamDomain::loss_dist, 0, opts);

  const auto dist_c = loss_distribution(coupled, t0, t1);
  const auto dist_u = loss_distribution(uncoupled, t0, t1);
  write_histogram(m, "loss_coupled.csv", cfg, dist_c);
  write_histogram(m, "loss_uncoupled.csv", cfg, dist_u);

  const int msize = default_systemic_size(cfg.params.n_banks);
  TableWriter t(out_path(m, "loss_summary.csv"),
                {"variant", "metric", "value", "std_error", "n_paths"}, cfg.raw, cfg.seed);
  const auto sys_c = systemic_risk_probability(coupled, t0, t1, msize);
  const auto sys_u = systemic_risk_probability(uncoupled, t0, t1, msize);
  const auto ind_c = individual_default_probability(coupled, t0, t1, 0);
  const auto ind_u = individual_default_probability(uncoupled, t0, t1, 0);
  t.row("coupled", "systemic_risk", sys_c.probability, sys_c.standard_error, sys_c.n_paths);
  t.row("uncoupled", "systemic_risk", sys_u.probability, sys_u.standard_error, sys_u.n_paths);
  t.row("coupled", "individual_default", ind_c.probability, ind_c.standard_error,
        ind_c.n_paths);
  t.row("uncoupled", "individual_default", ind_u.probability, ind_u.standard_error,
        ind_u.n_paths);
  t.row("coupled", "extreme_tail", dist_c.tail_probability(cfg.params.n_banks - 1), 0.0,
        dist_c.n_paths);
  t.row("uncoupled", "extreme_tail", dist_u.tail_probability(cfg.params.n_banks - 1), 0.0,
        dist_u.n_paths);

  if (m.dump_paths > 0) write_trajectories(m, "trajectories_coupled.csv", cfg, coupled);
}

// Quarterly governance loop; optional no-governance reference and multi-seed
// sweep (seed, seed+1, ...).
inline void run_govern(const RunManifest& m) {
  using namespace runner_detail;
  const ScenarioConfig cfg = load(m);
  GovernanceScenario sc = cfg.governance();

  const auto rec = run_governance(sc, m.threads);
  write_decisions(m, "decisions.csv", cfg, rec);
  write_indices(m, "indices.csv", cfg, rec, sc.seed);

  if (m.baseline) {
    const auto base = run_baseline(sc, m.threads);
    write_decisions(m, "baseline_decisions.csv", cfg, base);
    write_indices(m, "baseline_indices.csv", cfg, base, sc.seed);
  }

  if (m.seeds > 1) {
    TableWriter t(out_path(m, "indices_per_seed.csv"),
                  {"seed", "n_sr", "c_cost", "c_alpha", "c_gamma", "truncated"}, cfg.raw,
                  cfg.seed);
    double sum = 0.0, sumsq = 0.0, sum_cost = 0.0, sum_a = 0.0, sum_g = 0.0;
    for (int s = 0; s < m.seeds; ++s) {
      GovernanceScenario swept = sc;
      swept.seed = cfg.seed + static_cast<std::uint64_t>(s);
      const auto r = s == 0 ? rec : run_governance(swept, m.threads);
      t.row(swept.seed, r.indices.n_sr, r.indices.c_cost, r.indices.c_alpha, r.indices.c_gamma,
            r.truncated);
      sum += r.indices.n_sr;
      sumsq += r.indices.n_sr * r.indices.n_sr;
      sum_cost += r.indices.c_cost;
      sum_a += r.indices.c_alpha;
      sum_g += r.indices.c_gamma;
    }
    const double mean = sum / m.seeds;
    const double var = std::max(0.0, sumsq / m.seeds - mean * mean);
    const double spread = m.seeds > 1 ? std::sqrt(var * m.seeds / (m.seeds - 1)) : 0.0;
    TableWriter s(out_path(m, "indices_summary.csv"),
                  {"n_seeds", "n_sr_mean", "n_sr_spread", "c_cost_mean", "c_alpha_mean",
                   "c_gamma_mean"},
                  cfg.raw, cfg.seed);
    s.row(m.seeds, mean, spread, sum_cost / m.seeds, sum_a / m.seeds, sum_g / m.seeds);
  }
}

// Dumps the control coefficients and the extracted rates for the scenario's
// time-zero parameter values.
inline void run_riccati(const RunManifest& m) {
  using namespace runner_detail;
  const ScenarioConfig cfg = load(m);
  if (!cfg.weights) throw parse_error("scenario: missing 'weights' section");
  const double rho_a = eval_schedule(cfg.params.rho_a, 0.0);
  const double rho_l = eval_schedule(cfg.params.rho_l, 0.0);
  const double sigma_a = eval_schedule(cfg.params.sigma_a, 0.0);
  const double sigma_l = eval_schedule(cfg.params.sigma_l, 0.0);
  const auto sol = solve_riccati(*cfg.weights, rho_a, rho_l, sigma_a, sigma_l, cfg.window,
                                 cfg.riccati_steps);
  const auto rates = rates_from_riccati(sol, *cfg.weights, rho_a, rho_l);
  TableWriter t(out_path(m, "riccati.csv"),
                {"t", "a", "b", "c", "d", "alpha", "gamma", "g", "h"}, cfg.raw, cfg.seed);
  for (std::size_t k = 0; k < sol.t.size(); ++k)
    t.row(sol.t[k], sol.a[k], sol.b[k], sol.c[k], sol.d[k], rates.alpha[k], rates.gamma[k],
          rates.g[k], rates.h[k]);
}

// Built-in invariant suite; returns false when any check fails.
inline bool run_validate(const RunManifest& m, std::ostream& os = std::cout) {
  std::uint64_t seed = m.seed.value_or(0);
  if (!m.scenario_path.empty()) {
    const ScenarioConfig cfg = runner_detail::load(m);
    seed = cfg.seed;
  }
  const auto results = run_selfchecks(seed, m.threads);
  bool all = true;
  for (const auto& r : results) {
    os << (r.pass ? "ok   " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all = all && r.pass;
  }
  os << (all ? "validation passed" : "validation FAILED") << " (" << results.size()
     << " checks)\n";
  if (!m.out_dir.empty() && m.out_dir != ".") {
    std::ofstream f(runner_detail::out_path(m, "validate_report.txt"));
    for (const auto& r : results)
      f << (r.pass ? "ok   " : "FAIL ") << r.name << ": " << r.detail << "\n";
    f << (all ? "validation passed" : "validation FAILED") << "\n";
  }
  return all;
}

}  // namespace riskgov
