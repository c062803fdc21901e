#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "riskgov/errors.hpp"
#include "riskgov/state.hpp"

namespace riskgov {

// Histogram of the number of defaults per path within a window.
struct LossDistribution {
  std::vector<std::int64_t> counts;  // index k = exactly k defaults
  int n_paths = 0;

  std::vector<double> probabilities() const {
    std::vector<double> p(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k)
      p[k] = static_cast<double>(counts[k]) / n_paths;
    return p;
  }

  // P(defaults >= m)
  double tail_probability(int m) const {
    std::int64_t acc = 0;
    for (std::size_t k = static_cast<std::size_t>(m); k < counts.size(); ++k) acc += counts[k];
    return static_cast<double>(acc) / n_paths;
  }
};

struct RiskEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  int n_paths = 0;
};

namespace detail {

inline void require_clean(const PathEnsemble& ens) {
  if (ens.n_invalid > 0)
    throw blowup_error("ensemble contains " + std::to_string(ens.n_invalid) +
                       " invalid (overflowed) paths");
  if (ens.n_paths <= 0) throw std::domain_error("ensemble is empty");
}

inline void require_window(const PathEnsemble& ens, double tau1, double tau2) {
  if (!(tau1 <= tau2) || tau1 < ens.t0 - 1e-12 || tau2 > ens.t1 + 1e-12)
    throw std::domain_error("window outside the simulated span");
}

inline RiskEstimate frequency(std::int64_t hits, int n_paths) {
  const double p = static_cast<double>(hits) / n_paths;
  return {p, std::sqrt(p * (1.0 - p) / n_paths), n_paths};
}

}  // namespace detail

// Defaults per path inside the closed window [tau1, tau2].
inline std::vector<int> per_path_default_counts(const PathEnsemble& ens, double tau1,
                                                double tau2) {
  detail::require_clean(ens);
  detail::require_window(ens, tau1, tau2);
  std::vector<int> counts(ens.n_paths, 0);
  for (int p = 0; p < ens.n_paths; ++p) {
    const std::size_t off = static_cast<std::size_t>(p) * ens.n_banks;
    int k = 0;
    for (int i = 0; i < ens.n_banks; ++i) {
      const double td = ens.default_time[off + i];
      if (!std::isnan(td) && td >= tau1 && td <= tau2) ++k;
    }
    counts[p] = k;
  }
  return counts;
}

// Failures accumulated by tau2, including banks that were already dead when
// the window opened. A failed bank's frozen reserves sit below the default
// level in every later window, so the min-based failure event keeps holding
// for it; the governance loop measures this cumulative event.
inline std::vector<int> cumulative_default_counts(const PathEnsemble& ens, double tau2) {
  detail::require_clean(ens);
  std::vector<int> counts(ens.n_paths, 0);
  for (int p = 0; p < ens.n_paths; ++p) {
    const std::size_t off = static_cast<std::size_t>(p) * ens.n_banks;
    int k = 0;
    for (int i = 0; i < ens.n_banks; ++i) {
      const double td = ens.default_time[off + i];
      if (!std::isnan(td) && td <= tau2) ++k;
    }
    counts[p] = k;
  }
  return counts;
}

inline RiskEstimate systemic_risk_probability_cumulative(const PathEnsemble& ens, double tau2,
                                                         int m) {
  if (m < ens.n_banks / 2 || m > ens.n_banks)
    throw std::domain_error("systemic event size must satisfy int(N/2) <= M <= N");
  std::int64_t hits = 0;
  for (int k : cumulative_default_counts(ens, tau2)) hits += k >= m;
  return detail::frequency(hits, ens.n_paths);
}

inline LossDistribution loss_distribution(const PathEnsemble& ens, double tau1, double tau2) {
  LossDistribution dist;
  dist.n_paths = ens.n_paths;
  dist.counts.assign(ens.n_banks + 1, 0);
  for (int k : per_path_default_counts(ens, tau1, tau2)) ++dist.counts[k];
  return dist;
}

// Frequency of paths with at least m defaults in the window, with binomial
// standard error. Requires int(N/2) <= m <= N.
inline RiskEstimate systemic_risk_probability(const PathEnsemble& ens, double tau1, double tau2,
                                              int m) {
  if (m < ens.n_banks / 2 || m > ens.n_banks)
    throw std::domain_error("systemic event size must satisfy int(N/2) <= M <= N");
  std::int64_t hits = 0;
  for (int k : per_path_default_counts(ens, tau1, tau2)) hits += k >= m;
  return detail::frequency(hits, ens.n_paths);
}

inline int default_systemic_size(int n_banks) { return n_banks / 2 + 1; }

inline RiskEstimate individual_default_probability(const PathEnsemble& ens, double tau1,
                                                   double tau2, int bank) {
  if (bank < 0 || bank >= ens.n_banks) throw std::domain_error("invalid bank index");
  detail::require_clean(ens);
  detail::require_window(ens, tau1, tau2);
  std::int64_t hits = 0;
  for (int p = 0; p < ens.n_paths; ++p) {
    const double td = ens.default_time[static_cast<std::size_t>(p) * ens.n_banks + bank];
    hits += !std::isnan(td) && td >= tau1 && td <= tau2;
  }
  return detail::frequency(hits, ens.n_paths);
}

}  // namespace riskgov
