#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "riskgov/ideal_bank.hpp"
#include "riskgov/noise.hpp"
#include "riskgov/parallel.hpp"
#include "riskgov/params.hpp"
#include "riskgov/rates.hpp"
#include "riskgov/rng.hpp"
#include "riskgov/state.hpp"

namespace riskgov {

struct SimOptions {
  int threads = 0;      // 0 = hardware concurrency
  int dump_paths = 0;   // record trajectories of the first k paths
  int dump_stride = 1;  // every s-th step
};

namespace detail {

// Drift mode of one step. The cooperative model carries the coupling and
// target-path terms; the plain log-GBM form is the model the population
// reduces to when cooperation and intervention are absent.
struct StepCoef {
  double sigma_a, sigma_l;
  double rho_a, rho_l;
  double drift_a, drift_l;  // cooperative: dln(phi)/dt; gbm: mu - sigma^2/2
  double alpha, gamma;      // zero in gbm mode
};

// Advances every live bank by one Euler step, then applies the default check
// at the new time. Term order inside the update is fixed (coupling, target
// drift, diffusion) so that scalar reference computations can match exactly.
// Returns false when a live bank's reserves are no longer finite.
inline bool step_banks(SystemState& s, const StepCoef& c, double dt, double t_next,
                       const NoiseBlock& noise, double default_level, double inv_n) {
  const int n = s.n_banks();
  double sum_g = 0.0, sum_h = 0.0;
  int m = 0;
  for (int i = 0; i < n; ++i) {
    if (!s.alive[i]) continue;
    sum_g += s.log_assets[i];
    sum_h += s.log_liabilities[i];
    ++m;
  }
  const double ca = c.alpha * inv_n;
  const double cg = c.gamma * inv_n;
  for (int i = 0; i < n; ++i) {
    if (!s.alive[i]) continue;
    s.log_assets[i] = s.log_assets[i] + ca * (sum_g - m * s.log_assets[i]) * dt +
                      c.drift_a * dt + c.sigma_a * noise.dW[i];
    s.log_liabilities[i] = s.log_liabilities[i] + cg * (sum_h - m * s.log_liabilities[i]) * dt +
                           c.drift_l * dt + c.sigma_l * noise.dZ[i];
  }
  s.t = t_next;
  bool finite = true;
  for (int i = 0; i < n; ++i) {
    if (!s.alive[i]) continue;
    const double reserves = std::exp(s.log_assets[i]) - std::exp(s.log_liabilities[i]);
    if (!std::isfinite(reserves)) {
      finite = false;
      continue;
    }
    if (reserves < default_level) {
      s.alive[i] = 0;
      s.default_time[i] = t_next;
    }
  }
  return finite;
}

enum class DriftMode { cooperative, gbm };

inline int step_count(double t0, double t1, double dt) {
  if (!(t0 < t1)) throw std::domain_error("simulate: need t0 < t1");
  if (!(dt > 0.0)) throw std::domain_error("simulate: need dt > 0");
  const double span = t1 - t0;
  const long long n = std::llround(span / dt);
  if (n < 1 || std::abs(n * dt - span) > 1e-9 * span + 1e-12)
    throw std::domain_error("simulate: dt must divide the window");
  return static_cast<int>(n);
}

inline PathEnsemble simulate_impl(const ModelParams& params, const CooperationRates* rates,
                                  const IdealBankPath* ideal, DriftMode mode, double t0,
                                  double t1, const SystemState& initial, int n_paths, double dt,
                                  std::uint64_t seed, StreamDomain domain, std::uint64_t block,
                                  const SimOptions& opts) {
  params.validate();
  if (initial.n_banks() != params.n_banks)
    throw std::invalid_argument("simulate: initial state size mismatch");
  const int n_steps = step_count(t0, t1, dt);
  const int n = params.n_banks;

  std::vector<double> times(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k)
    times[k] = (k == n_steps) ? t1 : t0 + (t1 - t0) * (static_cast<double>(k) / n_steps);

  // Schedules, rates and the target path are shared by all paths; resolve
  // them once per step at the step's left endpoint.
  std::vector<StepCoef> coef(n_steps);
  for (int k = 0; k < n_steps; ++k) {
    const double t = times[k];
    StepCoef c{};
    c.sigma_a = eval_schedule(params.sigma_a, t);
    c.sigma_l = eval_schedule(params.sigma_l, t);
    c.rho_a = eval_schedule(params.rho_a, t);
    c.rho_l = eval_schedule(params.rho_l, t);
    if (mode == DriftMode::cooperative) {
      const auto r = rates->eval(t);
      const auto ib = eval_ideal(*ideal, t);
      c.alpha = r.alpha;
      c.gamma = r.gamma;
      c.drift_a = ib.dlog_phi_dt;
      c.drift_l = ib.dlog_psi_dt;
    } else {
      c.alpha = 0.0;
      c.gamma = 0.0;
      c.drift_a = params.mu_a - 0.5 * c.sigma_a * c.sigma_a;
      c.drift_l = params.mu_l - 0.5 * c.sigma_l * c.sigma_l;
    }
    coef[k] = c;
  }

  PathEnsemble ens;
  ens.n_banks = n;
  ens.n_paths = n_paths;
  ens.t0 = t0;
  ens.t1 = t1;
  ens.terminal_log_assets.resize(static_cast<std::size_t>(n_paths) * n);
  ens.terminal_log_liabilities.resize(static_cast<std::size_t>(n_paths) * n);
  ens.terminal_alive.resize(static_cast<std::size_t>(n_paths) * n);
  ens.default_time.resize(static_cast<std::size_t>(n_paths) * n);
  ens.path_valid.assign(n_paths, 1);
  if (n_paths == 0) return ens;

  const int dump_paths = std::min(opts.dump_paths, n_paths);
  const int stride = opts.dump_stride > 0 ? opts.dump_stride : 1;
  std::vector<std::vector<TrajectoryRow>> dumped(dump_paths);

  const double inv_n = 1.0 / n;
  parallel_for(n_paths, opts.threads, [&](int p) {
    SystemState s = initial;
    s.t = t0;
    CorrelatedNoise gen(derive_stream(seed, domain, block, static_cast<std::uint64_t>(p)), n);
    NoiseBlock noise;
    auto record = [&](std::vector<TrajectoryRow>& rows) {
      for (int i = 0; i < n; ++i)
        rows.push_back({p, s.t, i, s.log_assets[i], s.log_liabilities[i]});
    };
    const bool dump = p < dump_paths;
    if (dump) record(dumped[p]);
    bool valid = true;
    for (int k = 0; k < n_steps; ++k) {
      gen.fill(static_cast<std::uint64_t>(k), coef[k].rho_a, coef[k].rho_l, dt, noise);
      if (!step_banks(s, coef[k], dt, times[k + 1], noise, params.default_level, inv_n)) {
        valid = false;
        break;
      }
      if (dump && ((k + 1) % stride == 0 || k + 1 == n_steps)) record(dumped[p]);
    }
    ens.path_valid[p] = valid ? 1 : 0;
    const std::size_t off = static_cast<std::size_t>(p) * n;
    for (int i = 0; i < n; ++i) {
      ens.terminal_log_assets[off + i] = s.log_assets[i];
      ens.terminal_log_liabilities[off + i] = s.log_liabilities[i];
      ens.terminal_alive[off + i] = s.alive[i];
      ens.default_time[off + i] = s.default_time[i];
    }
  });

  for (auto& rows : dumped)
    ens.trajectories.insert(ens.trajectories.end(), rows.begin(), rows.end());
  for (auto v : ens.path_valid) ens.n_invalid += v == 0;
  return ens;
}

}  // namespace detail

// One explicit Euler step of the cooperative model. Coefficients are taken at
// state.t; the caller draws the noise with the correlations at state.t.
inline SystemState euler_step(const SystemState& state, const ModelParams& params,
                              const CooperationRates& rates, const IdealBankPath& ideal,
                              double dt, const NoiseBlock& noise) {
  if (!(dt > 0.0)) throw std::domain_error("euler_step: dt must be > 0");
  detail::StepCoef c{};
  c.sigma_a = eval_schedule(params.sigma_a, state.t);
  c.sigma_l = eval_schedule(params.sigma_l, state.t);
  const auto r = rates.eval(state.t);
  const auto ib = eval_ideal(ideal, state.t);
  c.alpha = r.alpha;
  c.gamma = r.gamma;
  c.drift_a = ib.dlog_phi_dt;
  c.drift_l = ib.dlog_psi_dt;
  SystemState out = state;
  detail::step_banks(out, c, dt, state.t + dt, noise, params.default_level,
                     1.0 / params.n_banks);
  return out;
}

// Cooperative model: coupling drifts plus the target-path ("ideal bank")
// drift, with correlated common noise.
inline PathEnsemble simulate(const ModelParams& params, const CooperationRates& rates,
                             const IdealBankPath& ideal, double t0, double t1,
                             const SystemState& initial, int n_paths, double dt,
                             std::uint64_t seed, StreamDomain domain, std::uint64_t block,
                             const SimOptions& opts = {}) {
  rates.validate();
  ideal.validate();
  return detail::simulate_impl(params, &rates, &ideal, detail::DriftMode::cooperative, t0, t1,
                               initial, n_paths, dt, seed, domain, block, opts);
}

// Plain log-GBM population (no cooperation, no intervention): the reduction
// the cooperative model collapses to with alpha = gamma = 0 and constant
// targets, kept in the drift form d ln a = (mu - sigma^2/2) dt + sigma dW.
inline PathEnsemble simulate_gbm(const ModelParams& params, double t0, double t1,
                                 const SystemState& initial, int n_paths, double dt,
                                 std::uint64_t seed, StreamDomain domain, std::uint64_t block,
                                 const SimOptions& opts = {}) {
  return detail::simulate_impl(params, nullptr, nullptr, detail::DriftMode::gbm, t0, t1,
                               initial, n_paths, dt, seed, domain, block, opts);
}

}  // namespace riskgov
