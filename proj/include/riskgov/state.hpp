#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "riskgov/params.hpp"

namespace riskgov {

// Absence of a default time is encoded as NaN.
inline constexpr double kNoDefault = std::numeric_limits<double>::quiet_NaN();

// Per-bank state of one realization of the banking system.
struct SystemState {
  double t = 0.0;
  std::vector<double> log_assets;       // G^i
  std::vector<double> log_liabilities;  // H^i
  std::vector<std::uint8_t> alive;
  std::vector<double> default_time;     // NaN while solvent

  static SystemState initial(const ModelParams& p, double t0) {
    SystemState s;
    s.t = t0;
    s.log_assets.assign(p.n_banks, std::log(p.a0));
    s.log_liabilities.assign(p.n_banks, std::log(p.l0));
    s.alive.assign(p.n_banks, 1);
    s.default_time.assign(p.n_banks, kNoDefault);
    return s;
  }

  int n_banks() const { return static_cast<int>(log_assets.size()); }

  int n_alive() const {
    int m = 0;
    for (auto a : alive) m += a != 0;
    return m;
  }

  bool has_defaulted(int i) const { return !std::isnan(default_time[i]); }
};

// One sampled trajectory record (capital reserves follow from exp(G) - exp(H)).
struct TrajectoryRow {
  int path;
  double t;
  int bank;
  double log_assets;
  double log_liabilities;
};

// Monte Carlo ensemble over one simulation window, stored path-major.
struct PathEnsemble {
  int n_banks = 0;
  int n_paths = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> terminal_log_assets;       // n_paths * n_banks
  std::vector<double> terminal_log_liabilities;  // n_paths * n_banks
  std::vector<std::uint8_t> terminal_alive;      // n_paths * n_banks
  std::vector<double> default_time;              // n_paths * n_banks, NaN = never
  std::vector<std::uint8_t> path_valid;          // 0 when the path overflowed
  int n_invalid = 0;
  std::vector<TrajectoryRow> trajectories;       // only when dumping was requested

  SystemState terminal_state(int path) const {
    SystemState s;
    s.t = t1;
    const std::size_t off = static_cast<std::size_t>(path) * n_banks;
    s.log_assets.assign(terminal_log_assets.begin() + off,
                        terminal_log_assets.begin() + off + n_banks);
    s.log_liabilities.assign(terminal_log_liabilities.begin() + off,
                             terminal_log_liabilities.begin() + off + n_banks);
    s.alive.assign(terminal_alive.begin() + off, terminal_alive.begin() + off + n_banks);
    s.default_time.assign(default_time.begin() + off, default_time.begin() + off + n_banks);
    return s;
  }
};

}  // namespace riskgov
