#pragma once

#include <cstddef>
#include <vector>

#include "riskgov/errors.hpp"

namespace riskgov {

// Time-gridded cooperation rates. alpha/gamma drive the mean-reverting
// coupling of the bank population and are kept nonnegative; g/h are the
// cross-coupling coefficients of the two-state approximation and carry the
// sign the extraction produces.
struct CooperationRates {
  std::vector<double> grid;  // strictly increasing
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<double> g;
  std::vector<double> h;

  struct Value {
    double alpha, gamma, g, h;
  };

  static CooperationRates constant(double t0, double t1, double alpha_v, double gamma_v) {
    return {{t0, t1}, {alpha_v, alpha_v}, {gamma_v, gamma_v}, {0.0, 0.0}, {0.0, 0.0}};
  }

  void validate() const {
    if (grid.size() < 2 || alpha.size() != grid.size() || gamma.size() != grid.size() ||
        g.size() != grid.size() || h.size() != grid.size())
      throw infeasible_error("rates: need matching grid/alpha/gamma/g/h with >= 2 points");
    for (std::size_t k = 0; k + 1 < grid.size(); ++k)
      if (!(grid[k] < grid[k + 1]))
        throw infeasible_error("rates: grid must be strictly increasing");
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (alpha[k] < 0.0 || gamma[k] < 0.0)
        throw infeasible_error("rates: alpha and gamma must be >= 0");
  }

  // Linear interpolation, clamped to the grid ends.
  Value eval(double t) const {
    if (t <= grid.front()) return {alpha.front(), gamma.front(), g.front(), h.front()};
    if (t >= grid.back()) return {alpha.back(), gamma.back(), g.back(), h.back()};
    std::size_t k = grid.size() - 2;
    while (k > 0 && grid[k] > t) --k;
    const double w = (t - grid[k]) / (grid[k + 1] - grid[k]);
    auto lerp = [&](const std::vector<double>& v) { return v[k] + (v[k + 1] - v[k]) * w; };
    return {lerp(alpha), lerp(gamma), lerp(g), lerp(h)};
  }

  CooperationRates shifted(double offset) const {
    CooperationRates out = *this;
    for (double& t : out.grid) t += offset;
    return out;
  }
};

namespace detail {

// Integral of the piecewise-linear interpolant over [t0, t1] (ends clamped).
inline double integrate_linear(const std::vector<double>& grid, const std::vector<double>& vals,
                               double t0, double t1) {
  auto value_at = [&](double t) {
    if (t <= grid.front()) return vals.front();
    if (t >= grid.back()) return vals.back();
    std::size_t k = grid.size() - 2;
    while (k > 0 && grid[k] > t) --k;
    const double w = (t - grid[k]) / (grid[k + 1] - grid[k]);
    return vals[k] + (vals[k + 1] - vals[k]) * w;
  };
  double acc = 0.0;
  double prev_t = t0, prev_v = value_at(t0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] <= t0) continue;
    if (grid[k] >= t1) break;
    acc += 0.5 * (prev_v + vals[k]) * (grid[k] - prev_t);
    prev_t = grid[k];
    prev_v = vals[k];
  }
  acc += 0.5 * (prev_v + value_at(t1)) * (t1 - prev_t);
  return acc;
}

}  // namespace detail

inline double mean_alpha(const CooperationRates& r, double t0, double t1) {
  return detail::integrate_linear(r.grid, r.alpha, t0, t1) / (t1 - t0);
}

inline double mean_gamma(const CooperationRates& r, double t0, double t1) {
  return detail::integrate_linear(r.grid, r.gamma, t0, t1) / (t1 - t0);
}

}  // namespace riskgov
