#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "riskgov/errors.hpp"

namespace riskgov {

// Evaluation of the target path at one time.
struct IdealBankPoint {
  double phi = 0.0;           // target assets
  double psi = 0.0;           // target liabilities
  double dlog_phi_dt = 0.0;   // d ln(phi)/dt, right-hand derivative at kinks
  double dlog_psi_dt = 0.0;   // d ln(psi)/dt
};

// Piecewise-linear target assets/liabilities of the reference ("ideal") bank.
// Positive, with a positive reserve gap phi - psi over the whole domain.
struct IdealBankPath {
  std::vector<double> knots;  // strictly increasing, at least 2
  std::vector<double> phi;    // values at knots
  std::vector<double> psi;

  static IdealBankPath constant(double t0, double t1, double phi0, double psi0) {
    return {{t0, t1}, {phi0, phi0}, {psi0, psi0}};
  }

  double t_start() const { return knots.front(); }
  double t_end() const { return knots.back(); }

  void validate() const {
    if (knots.size() < 2 || phi.size() != knots.size() || psi.size() != knots.size())
      throw infeasible_error("ideal path: need matching knots/phi/psi with >= 2 knots");
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
      if (!(knots[k] < knots[k + 1]))
        throw infeasible_error("ideal path: knots must be strictly increasing");
    for (std::size_t k = 0; k < knots.size(); ++k) {
      if (!(phi[k] > 0.0) || !(psi[k] > 0.0))
        throw infeasible_error("ideal path: phi and psi must stay > 0");
      if (!(phi[k] - psi[k] > 0.0))
        throw infeasible_error("ideal path: reserve gap phi - psi must stay > 0");
    }
  }
};

inline IdealBankPoint eval_ideal(const IdealBankPath& path, double t) {
  const auto& ts = path.knots;
  if (t < ts.front() || t > ts.back())
    throw std::domain_error("eval_ideal: t outside path domain");
  // segment whose left knot is <= t; at interior knots this selects the
  // right-hand segment, at t_end the last segment
  std::size_t k = ts.size() - 2;
  while (k > 0 && ts[k] > t) --k;
  const double dt = ts[k + 1] - ts[k];
  const double w = (t - ts[k]) / dt;
  IdealBankPoint p;
  p.phi = path.phi[k] + (path.phi[k + 1] - path.phi[k]) * w;
  p.psi = path.psi[k] + (path.psi[k + 1] - path.psi[k]) * w;
  p.dlog_phi_dt = (path.phi[k + 1] - path.phi[k]) / dt / p.phi;
  p.dlog_psi_dt = (path.psi[k + 1] - path.psi[k]) / dt / p.psi;
  return p;
}

}  // namespace riskgov
