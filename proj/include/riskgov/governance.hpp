#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskgov/errors.hpp"
#include "riskgov/ideal_bank.hpp"
#include "riskgov/params.hpp"
#include "riskgov/rates.hpp"
#include "riskgov/riccati.hpp"
#include "riskgov/risk_metrics.hpp"
#include "riskgov/sde_engine.hpp"
#include "riskgov/state.hpp"

namespace riskgov {

// Which side of the target balance sheet the authority may move to raise or
// lower the reserve gap. Holding still is always available.
enum class StrategySet {
  raise_assets_lower_assets,       // 1a, 2a, 3
  raise_assets_lower_liabilities,  // 1a, 2b, 3
  lower_liabilities_both,          // 1b, 2b, 3
};

inline StrategySet parse_strategy_set(const std::string& s) {
  if (s == "1a,2a,3") return StrategySet::raise_assets_lower_assets;
  if (s == "1a,2b,3") return StrategySet::raise_assets_lower_liabilities;
  if (s == "1b,2b,3") return StrategySet::lower_liabilities_both;
  throw parse_error("unknown strategy set '" + s + "' (expected 1a,2a,3 | 1a,2b,3 | 1b,2b,3)");
}

inline std::string to_string(StrategySet s) {
  switch (s) {
    case StrategySet::raise_assets_lower_assets: return "1a,2a,3";
    case StrategySet::raise_assets_lower_liabilities: return "1a,2b,3";
    case StrategySet::lower_liabilities_both: return "1b,2b,3";
  }
  return "?";
}

struct GovernanceScenario {
  ModelParams params;
  ControlWeights weights;
  double phi0 = 0.0;  // target path start; conventionally equal to a0 / l0
  double psi0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double horizon = 3.0;        // T2
  double decision_step = 0.25; // quarter
  double window = 1.0;         // risk window per decision
  StrategySet strategy_set = StrategySet::raise_assets_lower_assets;
  int n_inner = 2000;
  double dt = 1e-3;
  int riccati_steps = 10000;
  std::uint64_t seed = 0;
  double baseline_alpha = 10.0;
  double baseline_gamma = 10.0;

  int n_quarters() const {
    return static_cast<int>(std::llround((horizon - window) / decision_step)) + 1;
  }

  void validate() const {
    params.validate();
    weights.validate();
    if (!(phi0 > 0.0) || !(psi0 > 0.0) || !(phi0 - psi0 > 0.0))
      throw infeasible_error("governance: target start must satisfy phi0 > psi0 > 0");
    if (!(s1 > 0.0 && s1 < s2 && s2 < 1.0))
      throw infeasible_error("governance: thresholds must satisfy 0 < S1 < S2 < 1");
    if (!(decision_step > 0.0) || !(window > 0.0) || !(horizon >= window))
      throw infeasible_error("governance: bad horizon/window/decision step");
    const double q = (horizon - window) / decision_step;
    if (std::abs(q - std::llround(q)) > 1e-9)
      throw infeasible_error("governance: decision step must divide horizon - window");
    if (n_inner < 1) throw infeasible_error("governance: n_inner must be >= 1");
  }
};

// The ramp magnitudes available to a decision, in units of 1/8 slope.
inline constexpr int kMaxNotch = 8;
inline constexpr double kNotchSlope = 1.0 / 8.0;

// Target-asset candidate over one decision window: a ramp of slope n_a/8 over
// the first decision step, constant afterwards. Feasible only if it stays
// positive.
inline std::optional<std::vector<double>> candidate_assets(int n_a, double phi_start,
                                                           double dtau) {
  if (n_a < -kMaxNotch || n_a > kMaxNotch)
    throw std::domain_error("candidate_assets: notch out of [-8, 8]");
  if (!(phi_start > 0.0)) throw std::domain_error("candidate_assets: start must be > 0");
  const double end = (n_a * kNotchSlope) * dtau + phi_start;
  if (!(end > 0.0)) return std::nullopt;
  return std::vector<double>{phi_start, end, end};
}

inline std::optional<std::vector<double>> candidate_liabilities(int n_l, double psi_start,
                                                                double dtau) {
  return candidate_assets(n_l, psi_start, dtau);  // same ramp family
}

// Combined candidate on [tau1, tau2]; empty when either leg or the reserve
// gap phi - psi fails to stay positive.
inline std::optional<IdealBankPath> candidate_pair(int n_a, int n_l, double phi_start,
                                                   double psi_start, double tau1, double dtau,
                                                   double tau2) {
  const auto phis = candidate_assets(n_a, phi_start, dtau);
  const auto psis = candidate_liabilities(n_l, psi_start, dtau);
  if (!phis || !psis) return std::nullopt;
  IdealBankPath path{{tau1, tau1 + dtau, tau2}, *phis, *psis};
  for (std::size_t k = 0; k < path.knots.size(); ++k)
    if (!(path.phi[k] - path.psi[k] > 0.0)) return std::nullopt;
  return path;
}

struct QuarterDecision {
  int j = 0;
  int n_a = 0;
  int n_l = 0;
  RiskEstimate eta;
  double mean_alpha = 0.0;
  double mean_gamma = 0.0;
  double cost = 0.0;  // |n_a|/8 + |n_l|/8
  bool satisfied = false;
  bool evaluable = true;
};

struct PerformanceIndices {
  double n_sr = 0.0;
  double c_cost = 0.0;
  double c_alpha = 0.0;
  double c_gamma = 0.0;
};

struct GovernanceRecord {
  std::vector<QuarterDecision> decisions;
  PerformanceIndices indices;
  bool truncated = false;  // realized path lost every bank
  SystemState final_state;
};

inline PerformanceIndices performance_indices(const std::vector<QuarterDecision>& decisions) {
  PerformanceIndices idx;
  double sumsq = 0.0;
  for (const auto& d : decisions) {
    sumsq += d.eta.probability * d.eta.probability;
    idx.c_cost += d.cost;
    idx.c_alpha += d.mean_alpha;
    idx.c_gamma += d.mean_gamma;
  }
  idx.n_sr = std::sqrt(sumsq);
  return idx;
}

// Evaluates one candidate target path: n_inner paths of the bank system from
// the decision-time state, schedules frozen at their decision-time values.
// The estimated event is cumulative: at least M of the original banks dead by
// the end of the window, counting banks that failed before it. Inner path
// streams are keyed by (seed, quarter, path) only, so every candidate within
// a decision sees the same noise.
inline RiskEstimate evaluate_candidate(const SystemState& state, const ModelParams& frozen,
                                       const CooperationRates& rates,
                                       const IdealBankPath& candidate, double tau1, double tau2,
                                       int n_inner, double dt, std::uint64_t seed, int quarter,
                                       int systemic_size, int threads = 0,
                                       std::vector<int>* per_path_counts = nullptr) {
  SimOptions opts;
  opts.threads = threads;
  const PathEnsemble ens =
      simulate(frozen, rates, candidate, tau1, tau2, state, n_inner, dt, seed,
               StreamDomain::inner_eval, static_cast<std::uint64_t>(quarter), opts);
  if (per_path_counts) *per_path_counts = cumulative_default_counts(ens, tau2);
  return systemic_risk_probability_cumulative(ens, tau2, systemic_size);
}

// Candidate walk of one decision, in the documented order: the stay-put pair
// first; above the band, the raising leg of the strategy set outward; below
// it, the lowering leg. First candidate inside [S1, S2] wins; otherwise the
// evaluated candidate closest to the band is committed unsatisfied.
// Infeasible pairs are skipped; unevaluable ones count as failing.
template <class Evaluator>
QuarterDecision decide(int j, double phi_start, double psi_start, const GovernanceScenario& sc,
                       Evaluator&& evaluate) {
  const double tau1 = j * sc.decision_step;
  const double tau2 = tau1 + sc.window;

  struct Seen {
    int n_a, n_l;
    RiskEstimate eta;
  };
  std::vector<Seen> seen;
  auto try_pair = [&](int n_a, int n_l) -> std::optional<RiskEstimate> {
    const auto path = candidate_pair(n_a, n_l, phi_start, psi_start, tau1, sc.decision_step, tau2);
    if (!path) return std::nullopt;  // infeasible: skipped silently
    const std::optional<RiskEstimate> eta = evaluate(n_a, n_l, *path);
    if (eta) seen.push_back({n_a, n_l, *eta});
    return eta;
  };
  auto in_band = [&](const RiskEstimate& e) {
    return e.probability >= sc.s1 && e.probability <= sc.s2;
  };
  auto make = [&](int n_a, int n_l, const RiskEstimate& eta, bool satisfied, bool evaluable) {
    QuarterDecision d;
    d.j = j;
    d.n_a = n_a;
    d.n_l = n_l;
    d.eta = eta;
    d.cost = (std::abs(n_a) + std::abs(n_l)) / 8.0;
    d.satisfied = satisfied;
    d.evaluable = evaluable;
    return d;
  };

  const auto eta0 = try_pair(0, 0);
  if (!eta0) {
    RiskEstimate none{std::numeric_limits<double>::quiet_NaN(), 0.0, 0};
    return make(0, 0, none, false, false);
  }
  if (in_band(*eta0)) return make(0, 0, *eta0, true, true);

  const bool raise = eta0->probability > sc.s2;
  for (int step = 1; step <= kMaxNotch; ++step) {
    int n_a = 0, n_l = 0;
    if (raise) {
      // strategy 1a raises target assets, 1b lowers target liabilities
      if (sc.strategy_set == StrategySet::lower_liabilities_both)
        n_l = -step;
      else
        n_a = step;
    } else {
      // strategy 2a lowers target assets, 2b raises target liabilities
      if (sc.strategy_set == StrategySet::raise_assets_lower_assets)
        n_a = -step;
      else
        n_l = step;
    }
    const auto eta = try_pair(n_a, n_l);
    if (eta && in_band(*eta)) return make(n_a, n_l, *eta, true, true);
  }

  // nothing satisfied: best evaluated candidate by distance to the band
  const Seen* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& s : seen) {
    const double dist = std::max({sc.s1 - s.eta.probability, s.eta.probability - sc.s2, 0.0});
    if (dist < best_dist) {
      best_dist = dist;
      best = &s;
    }
  }
  if (!best) {
    RiskEstimate none{std::numeric_limits<double>::quiet_NaN(), 0.0, 0};
    return make(0, 0, none, false, false);
  }
  return make(best->n_a, best->n_l, best->eta, false, true);
}

namespace detail {

inline ModelParams freeze_at(const ModelParams& params, double t) {
  ModelParams frozen = params;
  frozen.sigma_a = Schedule::constant(0.0, eval_schedule(params.sigma_a, t));
  frozen.sigma_l = Schedule::constant(0.0, eval_schedule(params.sigma_l, t));
  frozen.rho_a = Schedule::constant(0.0, eval_schedule(params.rho_a, t));
  frozen.rho_l = Schedule::constant(0.0, eval_schedule(params.rho_l, t));
  return frozen;
}

struct QuarterContext {
  ModelParams frozen;
  CooperationRates rates;  // on absolute time [tau1, tau1 + window]
  double tau1, tau2;
};

inline QuarterContext quarter_context(const GovernanceScenario& sc, int j) {
  QuarterContext ctx;
  ctx.tau1 = j * sc.decision_step;
  ctx.tau2 = ctx.tau1 + sc.window;
  ctx.frozen = freeze_at(sc.params, ctx.tau1);
  const double rho_a = ctx.frozen.rho_a.values[0];
  const double rho_l = ctx.frozen.rho_l.values[0];
  // The control problem is re-solved on each decision window with the frozen
  // decision-time values; sigma only enters the constant coefficient d.
  const RiccatiSolution sol =
      solve_riccati(sc.weights, rho_a, rho_l, ctx.frozen.sigma_a.values[0],
                    ctx.frozen.sigma_l.values[0], sc.window, sc.riccati_steps);
  ctx.rates = rates_from_riccati(sol, sc.weights, rho_a, rho_l).shifted(ctx.tau1);
  return ctx;
}

}  // namespace detail

// Runs the full quarterly loop on one realized path: decide under frozen
// parameters, commit the choice, advance the realized path one decision step
// under the true (possibly shocked) schedules.
inline GovernanceRecord run_governance(const GovernanceScenario& sc, int threads = 0) {
  sc.validate();
  GovernanceRecord rec;
  SystemState state = SystemState::initial(sc.params, 0.0);
  double phi_cur = sc.phi0;
  double psi_cur = sc.psi0;
  const int systemic_size = default_systemic_size(sc.params.n_banks);

  for (int j = 0; j < sc.n_quarters(); ++j) {
    const double tau1 = j * sc.decision_step;
    const double tau2 = tau1 + sc.window;
    std::optional<detail::QuarterContext> ctx;
    try {
      ctx = detail::quarter_context(sc, j);
    } catch (const blowup_error&) {
      // no rates exist for this window; hold still and record the failure
    }
    QuarterDecision d;
    if (!ctx) {
      d.j = j;
      d.eta = {std::numeric_limits<double>::quiet_NaN(), 0.0, 0};
      d.satisfied = false;
      d.evaluable = false;
    } else {
      auto evaluator = [&](int, int, const IdealBankPath& path) -> std::optional<RiskEstimate> {
        return evaluate_candidate(state, ctx->frozen, ctx->rates, path, tau1, tau2, sc.n_inner,
                                  sc.dt, sc.seed, j, systemic_size, threads);
      };
      d = decide(j, phi_cur, psi_cur, sc, evaluator);
      d.mean_alpha = mean_alpha(ctx->rates, tau1, tau2);
      d.mean_gamma = mean_gamma(ctx->rates, tau1, tau2);
    }
    rec.decisions.push_back(d);

    // commit and advance the realized path one decision step under the true
    // schedules
    const auto committed =
        candidate_pair(d.n_a, d.n_l, phi_cur, psi_cur, tau1, sc.decision_step, tau2);
    const IdealBankPath path =
        committed ? *committed : IdealBankPath::constant(tau1, tau2, phi_cur, psi_cur);
    if (ctx) {
      SimOptions opts;
      opts.threads = 1;  // single realized path
      const PathEnsemble outer =
          simulate(sc.params, ctx->rates, path, tau1, tau1 + sc.decision_step, state, 1, sc.dt,
                   sc.seed, StreamDomain::outer_path, static_cast<std::uint64_t>(j), opts);
      if (outer.n_invalid > 0) throw blowup_error("governance: realized path overflowed");
      state = outer.terminal_state(0);
    } else {
      state.t = tau1 + sc.decision_step;
    }
    const auto end_point = eval_ideal(path, tau1 + sc.decision_step);
    phi_cur = end_point.phi;
    psi_cur = end_point.psi;

    if (state.n_alive() == 0) {
      rec.truncated = true;
      break;
    }
  }
  rec.indices = performance_indices(rec.decisions);
  rec.final_state = state;
  return rec;
}

// Reference run without governance: fixed cooperation rates, constant target
// path, the systemic-risk probability merely observed each quarter.
inline GovernanceRecord run_baseline(const GovernanceScenario& sc, int threads = 0) {
  sc.validate();
  GovernanceRecord rec;
  SystemState state = SystemState::initial(sc.params, 0.0);
  const int systemic_size = default_systemic_size(sc.params.n_banks);
  const double t_end = (sc.n_quarters() - 1) * sc.decision_step + sc.window;
  const IdealBankPath path = IdealBankPath::constant(0.0, t_end, sc.phi0, sc.psi0);
  const CooperationRates rates =
      CooperationRates::constant(0.0, t_end, sc.baseline_alpha, sc.baseline_gamma);

  for (int j = 0; j < sc.n_quarters(); ++j) {
    const double tau1 = j * sc.decision_step;
    const double tau2 = tau1 + sc.window;
    const ModelParams frozen = detail::freeze_at(sc.params, tau1);
    QuarterDecision d;
    d.j = j;
    d.eta = evaluate_candidate(state, frozen, rates, path, tau1, tau2, sc.n_inner, sc.dt,
                               sc.seed, j, systemic_size, threads);
    d.mean_alpha = sc.baseline_alpha;
    d.mean_gamma = sc.baseline_gamma;
    d.satisfied = d.eta.probability >= sc.s1 && d.eta.probability <= sc.s2;
    rec.decisions.push_back(d);

    SimOptions opts;
    opts.threads = 1;
    const PathEnsemble outer =
        simulate(sc.params, rates, path, tau1, tau1 + sc.decision_step, state, 1, sc.dt,
                 sc.seed, StreamDomain::outer_path, static_cast<std::uint64_t>(j), opts);
    if (outer.n_invalid > 0) throw blowup_error("governance: realized path overflowed");
    state = outer.terminal_state(0);
    if (state.n_alive() == 0) {
      rec.truncated = true;
      break;
    }
  }
  rec.indices = performance_indices(rec.decisions);
  rec.final_state = state;
  return rec;
}

}  // namespace riskgov
