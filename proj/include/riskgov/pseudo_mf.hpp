#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "riskgov/ideal_bank.hpp"
#include "riskgov/parallel.hpp"
#include "riskgov/rates.hpp"
#include "riskgov/rng.hpp"
#include "riskgov/sde_engine.hpp"

namespace riskgov {

// Two-state reduced model of the bank population: Z tracks log-assets minus
// the log target, S the liabilities analogue. Both start at zero.
struct PmfState {
  double t = 0.0;
  double Z = 0.0;
  double S = 0.0;
};

struct PmfRow {
  int path;
  double t;
  double Z;
  double S;
};

struct PmfEnsemble {
  int n_paths = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> terminal_Z;
  std::vector<double> terminal_S;
  std::vector<std::uint8_t> path_valid;
  int n_invalid = 0;
  std::vector<PmfRow> trajectories;
};

struct PmfDrift {
  double beta_a, beta_l;
};

// Drift of the reduced model: mean reversion damped by the correlation level
// plus the cross-coupling through g and h.
inline PmfDrift drift_beta(const CooperationRates& rates, double rho_a, double rho_l, double t,
                           double Z, double S) {
  const auto r = rates.eval(t);
  const double ra = std::abs(rho_a);
  const double rl = std::abs(rho_l);
  return {-(r.alpha * (1.0 - ra)) * Z - (ra * r.g) * S,
          -(r.gamma * (1.0 - rl)) * S - (rl * r.h) * Z};
}

namespace detail {

enum class ReducedForm { pseudo_mean_field, mean_field };

inline PmfEnsemble simulate_reduced(const CooperationRates& rates, double rho_a, double rho_l,
                                    double sigma_a, double sigma_l, const IdealBankPath* ideal,
                                    double t0, double t1, int n_paths, double dt,
                                    std::uint64_t seed, StreamDomain domain,
                                    std::uint64_t block, ReducedForm form,
                                    const SimOptions& opts) {
  rates.validate();
  if (form == ReducedForm::pseudo_mean_field &&
      !(std::abs(rho_a) <= 1.0 && std::abs(rho_l) <= 1.0))
    throw std::domain_error("simulate_pmf: |rho| must be <= 1");
  const int n_steps = step_count(t0, t1, dt);

  std::vector<double> times(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k)
    times[k] = (k == n_steps) ? t1 : t0 + (t1 - t0) * (static_cast<double>(k) / n_steps);

  PmfEnsemble ens;
  ens.n_paths = n_paths;
  ens.t0 = t0;
  ens.t1 = t1;
  ens.terminal_Z.resize(n_paths);
  ens.terminal_S.resize(n_paths);
  ens.path_valid.assign(n_paths, 1);
  if (n_paths == 0) return ens;

  // per-step rate values, shared by every path
  struct Coef {
    double az, cs, gs, hz;  // Z and S mean-reversion / cross factors
  };
  const double ra = std::abs(rho_a);
  const double rl = std::abs(rho_l);
  std::vector<Coef> coef(n_steps);
  for (int k = 0; k < n_steps; ++k) {
    const auto r = rates.eval(times[k]);
    if (form == ReducedForm::mean_field)
      coef[k] = {r.alpha, 0.0, r.gamma, 0.0};
    else
      coef[k] = {r.alpha * (1.0 - ra), ra * r.g, r.gamma * (1.0 - rl), rl * r.h};
  }
  const double sdt = std::sqrt(dt);

  const int dump_paths = std::min(opts.dump_paths, n_paths);
  const int stride = opts.dump_stride > 0 ? opts.dump_stride : 1;
  std::vector<std::vector<PmfRow>> dumped(dump_paths);

  parallel_for(n_paths, opts.threads, [&](int p) {
    const StreamKey key = derive_stream(seed, domain, block, static_cast<std::uint64_t>(p));
    double Z = 0.0, S = 0.0;
    const bool dump = p < dump_paths;
    if (dump) dumped[p].push_back({p, t0, Z, S});
    double pair[2];
    bool valid = true;
    for (int k = 0; k < n_steps; ++k) {
      fill_normals(key, static_cast<std::uint64_t>(k), pair);
      const double beta_a = -(coef[k].az * Z) - (coef[k].cs * S);
      const double beta_l = -(coef[k].gs * S) - (coef[k].hz * Z);
      Z = Z + beta_a * dt + sigma_a * (sdt * pair[0]);
      S = S + beta_l * dt + sigma_l * (sdt * pair[1]);
      if (!std::isfinite(Z) || !std::isfinite(S)) {
        valid = false;
        break;
      }
      if (dump && ((k + 1) % stride == 0 || k + 1 == n_steps))
        dumped[p].push_back({p, times[k + 1], Z, S});
    }
    ens.path_valid[p] = valid ? 1 : 0;
    ens.terminal_Z[p] = Z;
    ens.terminal_S[p] = S;
  });

  for (auto& rows : dumped)
    ens.trajectories.insert(ens.trajectories.end(), rows.begin(), rows.end());
  for (auto v : ens.path_valid) ens.n_invalid += v == 0;
  (void)ideal;  // only needed by callers reconstructing reserves from Z, S
  return ens;
}

}  // namespace detail

// Reduced model with cross-coupling; exact mean-field form when rho = 0.
inline PmfEnsemble simulate_pmf(const CooperationRates& rates, double rho_a, double rho_l,
                                double sigma_a, double sigma_l, const IdealBankPath& ideal,
                                double t0, double t1, int n_paths, double dt, std::uint64_t seed,
                                StreamDomain domain = StreamDomain::pmf, std::uint64_t block = 0,
                                const SimOptions& opts = {}) {
  return detail::simulate_reduced(rates, rho_a, rho_l, sigma_a, sigma_l, &ideal, t0, t1,
                                  n_paths, dt, seed, domain, block,
                                  detail::ReducedForm::pseudo_mean_field, opts);
}

// Uncorrelated mean-field limit, as an independent code route for the
// reduction checks.
inline PmfEnsemble simulate_mf(const CooperationRates& rates, double sigma_a, double sigma_l,
                               const IdealBankPath& ideal, double t0, double t1, int n_paths,
                               double dt, std::uint64_t seed,
                               StreamDomain domain = StreamDomain::pmf, std::uint64_t block = 0,
                               const SimOptions& opts = {}) {
  return detail::simulate_reduced(rates, 0.0, 0.0, sigma_a, sigma_l, &ideal, t0, t1, n_paths,
                                  dt, seed, domain, block, detail::ReducedForm::mean_field,
                                  opts);
}

// Reserves of the reduced bank at (t, Z, S).
inline double pmf_reserves(const IdealBankPath& ideal, double t, double Z, double S) {
  const auto p = eval_ideal(ideal, t);
  return std::exp(Z + std::log(p.phi)) - std::exp(S + std::log(p.psi));
}

}  // namespace riskgov
