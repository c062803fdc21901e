#pragma once

#include "riskgov/errors.hpp"
#include "riskgov/schedule.hpp"

namespace riskgov {

// Bank population parameters. Volatilities and correlations are schedules;
// drifts are annual rates; a0/l0 are the common initial assets/liabilities.
struct ModelParams {
  int n_banks = 0;
  double mu_a = 0.0;
  double mu_l = 0.0;
  Schedule sigma_a;
  Schedule sigma_l;
  Schedule rho_a;
  Schedule rho_l;
  double a0 = 0.0;
  double l0 = 0.0;
  double default_level = 0.0;

  void validate() const {
    if (n_banks <= 1) throw infeasible_error("model: n_banks must be > 1");
    if (!(a0 > 0.0) || !(l0 > 0.0))
      throw infeasible_error("model: a0 and l0 must be > 0");
    if (!(a0 - l0 > 0.0))
      throw infeasible_error("model: banks must start solvent (a0 > l0)");
    if (!(default_level >= 0.0))
      throw infeasible_error("model: default level must be >= 0");
    sigma_a.validate_volatility();
    sigma_l.validate_volatility();
    rho_a.validate_correlation();
    rho_l.validate_correlation();
  }
};

inline double capital_reserves(double assets, double liabilities) {
  return assets - liabilities;
}

// Penalty weights of the control objective.
struct ControlWeights {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  double lambda4 = 0.0;

  void validate() const {
    if (!(lambda1 > 0.0 && lambda2 > 0.0 && lambda3 > 0.0 && lambda4 > 0.0))
      throw infeasible_error("weights: all lambdas must be > 0");
  }
};

}  // namespace riskgov
