#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "riskgov/governance.hpp"
#include "riskgov/pseudo_mf.hpp"
#include "riskgov/riccati.hpp"
#include "riskgov/risk_metrics.hpp"
#include "riskgov/rng.hpp"
#include "riskgov/sde_engine.hpp"

namespace riskgov {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace selfcheck_detail {

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// deterministic uniform in [lo, hi] from a validation stream
inline double uniform(StreamKey key, std::uint64_t step, std::uint64_t slot, double lo,
                      double hi) {
  const double u = detail::to_unit(detail::mix64(
      detail::mix64(key.key ^ (detail::kStepMul * (step + 1))) ^ (detail::kSlotMul * (slot + 1))));
  return lo + (hi - lo) * u;
}

inline ModelParams gbm_check_params() {
  ModelParams p;
  p.n_banks = 2;
  p.mu_a = 0.1;
  p.mu_l = 0.1;
  p.a0 = 1.0;
  p.l0 = 1e-4;  // margin so wide that first passage is unreachable
  p.sigma_a = Schedule::constant(0.0, 0.8);
  p.sigma_l = Schedule::constant(0.0, 0.1);
  p.rho_a = Schedule::constant(0.0, 0.3);
  p.rho_l = Schedule::constant(0.0, 0.0);
  return p;
}

}  // namespace selfcheck_detail

inline CheckResult check_riccati_closed_form() {
  using namespace selfcheck_detail;
  ControlWeights w{0.1, 0.1, 0.1, 0.1};
  const auto sol = solve_riccati(w, 0.0, 0.0, 0.3, 0.3, 1.0, 10000);
  const double expected = std::sqrt(w.lambda1 * w.lambda3) *
                          std::tanh(std::sqrt(w.lambda3 / w.lambda1) * 1.0);
  const double err = std::abs(sol.a.front() - expected);
  double cmax = 0.0;
  for (double c : sol.c) cmax = std::max(cmax, std::abs(c));
  const bool pass = err < 1e-8 && cmax < 1e-12;
  return {"riccati_closed_form", pass,
          "|a(0)-target|=" + num(err) + " (bound 1e-8), max|c|=" + num(cmax) +
              " (bound 1e-12)"};
}

inline CheckResult check_riccati_residuals(std::uint64_t seed, int n_sets = 10) {
  using namespace selfcheck_detail;
  const StreamKey key = derive_stream(seed, StreamDomain::validation, 1, 0);
  double worst = 0.0;
  int solved = 0;
  for (int s = 0; s < n_sets; ++s) {
    ControlWeights w{uniform(key, s, 0, 0.05, 0.5), uniform(key, s, 1, 0.05, 0.5),
                     uniform(key, s, 2, 0.05, 0.5), uniform(key, s, 3, 0.05, 0.5)};
    const double ra = uniform(key, s, 4, 0.0, 0.8);
    const double rl = uniform(key, s, 5, 0.0, 0.8);
    const double sa = uniform(key, s, 6, 0.2, 1.0);
    const double sl = uniform(key, s, 7, 0.2, 1.0);
    const double T1 = uniform(key, s, 8, 0.5, 2.0);
    try {
      const auto sol = solve_riccati(w, ra, rl, sa, sl, T1, 10000);
      worst = std::max(worst, riccati_residual_max(sol, w, ra, rl, sa, sl));
      ++solved;
    } catch (const blowup_error&) {
      // admissible draw without a global solution: not this check's concern
    }
  }
  const bool pass = solved > 0 && worst < 1e-6;
  return {"riccati_residuals", pass,
          "max residual=" + num(worst) + " over " + std::to_string(solved) +
              " solved sets (bound 1e-6)"};
}

inline CheckResult check_feedback_roundtrip() {
  using namespace selfcheck_detail;
  ControlWeights w{0.2, 0.1, 0.15, 0.3};
  const double ra = 0.5, rl = 0.3;
  const auto sol = solve_riccati(w, ra, rl, 0.4, 0.6, 1.0, 10000);
  const auto rates = rates_from_riccati(sol, w, ra, rl);
  double worst = 0.0;
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    if (sol.a[k] < 0.0 || sol.b[k] < 0.0) continue;  // clamped points excluded
    worst = std::max(worst, std::abs(rates.alpha[k] * (1.0 - ra) - sol.a[k] / w.lambda1));
    worst = std::max(worst, std::abs(rates.gamma[k] * (1.0 - rl) - sol.b[k] / w.lambda2));
    worst = std::max(worst, std::abs(ra * rates.g[k] - sol.c[k] / (2.0 * w.lambda1)));
    worst = std::max(worst, std::abs(rl * rates.h[k] - sol.c[k] / (2.0 * w.lambda2)));
  }
  return {"feedback_roundtrip", worst < 1e-12,
          "max coefficient mismatch=" + num(worst) + " (bound 1e-12)"};
}

inline CheckResult check_noise_moments(std::uint64_t seed) {
  using namespace selfcheck_detail;
  const double rho_a = 0.5;
  const double dt = 1e-3;
  const int n = 200000;
  CorrelatedNoise gen(derive_stream(seed, StreamDomain::validation, 2, 0), 10);
  NoiseBlock block;
  double sum = 0.0, sumsq = 0.0;
  for (int s = 0; s < n; ++s) {
    gen.fill(static_cast<std::uint64_t>(s), rho_a, 0.0, dt, block);
    const double x = block.dW[0] * block.dW[1] / dt;
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sumsq / n - mean * mean) / n);
  const double err = std::abs(mean - rho_a * rho_a);
  return {"noise_cross_moment", err < 3.0 * se,
          "E[dW1 dW2]/dt=" + num(mean) + " target=" + num(rho_a * rho_a) +
              " |err|=" + num(err) + " (3 s.e.=" + num(3.0 * se) + ")"};
}

inline CheckResult check_gbm_mean(std::uint64_t seed, int threads) {
  using namespace selfcheck_detail;
  const ModelParams p = gbm_check_params();
  const int n_paths = 10000;
  SimOptions opts;
  opts.threads = threads;
  const auto ens = simulate_gbm(p, 0.0, 1.0, SystemState::initial(p, 0.0), n_paths, 1e-3, seed,
                                StreamDomain::validation, 3, opts);
  double sum = 0.0, sumsq = 0.0;
  for (int q = 0; q < n_paths; ++q) {
    const double a = std::exp(ens.terminal_log_assets[static_cast<std::size_t>(q) * p.n_banks]);
    sum += a;
    sumsq += a * a;
  }
  const double mean = sum / n_paths;
  const double se = std::sqrt((sumsq / n_paths - mean * mean) / n_paths);
  const double target = p.a0 * std::exp(p.mu_a * 1.0);
  const double err = std::abs(mean - target);
  return {"gbm_mean", err < 3.0 * se,
          "mean=" + num(mean) + " target=" + num(target) + " |err|=" + num(err) +
              " (3 s.e.=" + num(3.0 * se) + ")"};
}

inline CheckResult check_ou_variance(std::uint64_t seed, int threads) {
  using namespace selfcheck_detail;
  const double alpha = 1.0, sigma = 0.5, T = 1.0;
  const auto rates = CooperationRates::constant(0.0, T, alpha, alpha);
  const auto ideal = IdealBankPath::constant(0.0, T, 1.0, 0.5);
  const int n_paths = 100000;
  SimOptions opts;
  opts.threads = threads;
  const auto ens = simulate_pmf(rates, 0.0, 0.0, sigma, sigma, ideal, 0.0, T, n_paths, 1e-3,
                                seed, StreamDomain::validation, 4, opts);
  double sum = 0.0, sumsq = 0.0;
  for (double z : ens.terminal_Z) {
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n_paths;
  const double var = sumsq / n_paths - mean * mean;
  const double target = sigma * sigma * (1.0 - std::exp(-2.0 * alpha * T)) / (2.0 * alpha);
  const double se = target * std::sqrt(2.0 / (n_paths - 1));
  const double err = std::abs(var - target);
  return {"ou_variance", err < 3.0 * se,
          "var=" + num(var) + " target=" + num(target) + " |err|=" + num(err) +
              " (3 s.e.=" + num(3.0 * se) + ")"};
}

inline CheckResult check_pmf_mf_reduction(std::uint64_t seed) {
  const auto rates = CooperationRates::constant(0.0, 1.0, 2.0, 1.5);
  const auto ideal = IdealBankPath::constant(0.0, 1.0, 1.0, 0.5);
  SimOptions opts;
  opts.dump_paths = 8;
  opts.dump_stride = 1;
  const auto pmf = simulate_pmf(rates, 0.0, 0.0, 0.4, 0.3, ideal, 0.0, 1.0, 8, 1e-2, seed,
                                StreamDomain::validation, 5, opts);
  const auto mf = simulate_mf(rates, 0.4, 0.3, ideal, 0.0, 1.0, 8, 1e-2, seed,
                              StreamDomain::validation, 5, opts);
  bool same = pmf.trajectories.size() == mf.trajectories.size();
  for (std::size_t i = 0; same && i < pmf.trajectories.size(); ++i)
    same = pmf.trajectories[i].Z == mf.trajectories[i].Z &&
           pmf.trajectories[i].S == mf.trajectories[i].S;
  for (int q = 0; same && q < pmf.n_paths; ++q)
    same = pmf.terminal_Z[q] == mf.terminal_Z[q] && pmf.terminal_S[q] == mf.terminal_S[q];
  return {"pmf_mf_reduction", same,
          same ? "trajectories identical at rho = 0" : "trajectories differ at rho = 0"};
}

inline CheckResult check_full_correlation_replication(std::uint64_t seed) {
  ModelParams p;
  p.n_banks = 10;
  p.mu_a = 0.1;
  p.mu_l = 0.1;
  p.a0 = 0.6;
  p.l0 = 0.4;
  p.sigma_a = Schedule::constant(0.0, 0.4);
  p.sigma_l = Schedule::constant(0.0, 0.3);
  p.rho_a = Schedule::constant(0.0, 1.0);
  p.rho_l = Schedule::constant(0.0, 1.0);
  const auto rates = CooperationRates::constant(0.0, 1.0, 5.0, 5.0);
  const auto ideal = IdealBankPath::constant(0.0, 1.0, 0.6, 0.4);
  SimOptions opts;
  opts.dump_paths = 4;
  opts.dump_stride = 1;
  const auto ens = simulate(p, rates, ideal, 0.0, 1.0, SystemState::initial(p, 0.0), 4, 1e-2,
                            seed, StreamDomain::validation, 6, opts);
  bool same = true;
  // rows are grouped per (path, time) with banks consecutive
  for (std::size_t i = 0; same && i + p.n_banks <= ens.trajectories.size();
       i += p.n_banks)
    for (int b = 1; b < p.n_banks; ++b)
      same = same &&
             ens.trajectories[i + b].log_assets == ens.trajectories[i].log_assets &&
             ens.trajectories[i + b].log_liabilities == ens.trajectories[i].log_liabilities;
  return {"full_correlation_replication", same,
          same ? "all banks identical under |rho| = 1" : "banks diverged under |rho| = 1"};
}

inline CheckResult check_thread_determinism(std::uint64_t seed) {
  using namespace selfcheck_detail;
  const ModelParams p = gbm_check_params();
  bool same = true;
  for (std::uint64_t s = 0; same && s < 5; ++s) {
    SimOptions one;
    one.threads = 1;
    SimOptions four;
    four.threads = 4;
    const auto e1 = simulate_gbm(p, 0.0, 0.5, SystemState::initial(p, 0.0), 256, 1e-2, seed + s,
                                 StreamDomain::validation, 7, one);
    const auto e2 = simulate_gbm(p, 0.0, 0.5, SystemState::initial(p, 0.0), 256, 1e-2, seed + s,
                                 StreamDomain::validation, 7, four);
    auto bits = [](const std::vector<double>& a, const std::vector<double>& b) {
      return a.size() == b.size() &&
             std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
    };
    same = bits(e1.terminal_log_assets, e2.terminal_log_assets) &&
           bits(e1.terminal_log_liabilities, e2.terminal_log_liabilities) &&
           bits(e1.default_time, e2.default_time);
  }
  return {"thread_determinism", same,
          same ? "ensembles identical for 1 and 4 workers over 5 seeds"
               : "ensembles depend on worker count"};
}

inline std::vector<CheckResult> run_selfchecks(std::uint64_t seed, int threads) {
  std::vector<CheckResult> out;
  out.push_back(check_riccati_closed_form());
  out.push_back(check_riccati_residuals(seed));
  out.push_back(check_feedback_roundtrip());
  out.push_back(check_noise_moments(seed));
  out.push_back(check_gbm_mean(seed, threads));
  out.push_back(check_ou_variance(seed, threads));
  out.push_back(check_pmf_mf_reduction(seed));
  out.push_back(check_full_correlation_replication(seed));
  out.push_back(check_thread_determinism(seed));
  return out;
}

}  // namespace riskgov
