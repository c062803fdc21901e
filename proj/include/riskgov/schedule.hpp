#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "riskgov/errors.hpp"

namespace riskgov {

// Piecewise-constant function of time, right-continuous: values[k] holds on
// [breakpoints[k], breakpoints[k+1]) and the last value extends to +infinity.
struct Schedule {
  std::vector<double> breakpoints;
  std::vector<double> values;

  static Schedule constant(double start, double value) { return {{start}, {value}}; }

  void validate() const {
    if (breakpoints.empty() || breakpoints.size() != values.size())
      throw infeasible_error("schedule: need one value per breakpoint");
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k)
      if (!(breakpoints[k] < breakpoints[k + 1]))
        throw infeasible_error("schedule: breakpoints must be strictly increasing");
    for (double t : breakpoints)
      if (!std::isfinite(t)) throw infeasible_error("schedule: non-finite breakpoint");
    for (double v : values)
      if (!std::isfinite(v)) throw infeasible_error("schedule: non-finite value");
  }

  // zero is admitted so the degenerate deterministic system stays expressible
  void validate_volatility() const {
    validate();
    for (double v : values)
      if (v < 0.0) throw infeasible_error("volatility schedule: values must be >= 0");
  }

  void validate_correlation() const {
    validate();
    for (double v : values)
      if (!(v >= -1.0 && v <= 1.0))
        throw infeasible_error("correlation schedule: values must be in [-1, 1]");
  }
};

inline double eval_schedule(const Schedule& s, double t) {
  if (s.breakpoints.empty()) throw infeasible_error("schedule: empty");
  if (t < s.breakpoints.front())
    throw std::domain_error("eval_schedule: t before first breakpoint");
  // last segment whose breakpoint is <= t
  std::size_t k = s.breakpoints.size() - 1;
  while (k > 0 && s.breakpoints[k] > t) --k;
  return s.values[k];
}

}  // namespace riskgov
