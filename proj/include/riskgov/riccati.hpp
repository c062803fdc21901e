#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "riskgov/errors.hpp"
#include "riskgov/params.hpp"
#include "riskgov/rates.hpp"

namespace riskgov {

// Coefficients of the quadratic value function V = a Z^2 + b S^2 + c Z S + d
// on a uniform grid over [0, T1], all vanishing at T1.
struct RiccatiSolution {
  double T1 = 0.0;
  std::vector<double> t;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> d;

  struct Value {
    double a, b, c, d;
  };

  Value eval(double time) const {
    if (time < t.front() - 1e-12 || time > t.back() + 1e-12)
      throw std::domain_error("riccati eval: t outside [0, T1]");
    if (time <= t.front()) return {a.front(), b.front(), c.front(), d.front()};
    if (time >= t.back()) return {a.back(), b.back(), c.back(), d.back()};
    std::size_t k = t.size() - 2;
    while (k > 0 && t[k] > time) --k;
    const double w = (time - t[k]) / (t[k + 1] - t[k]);
    auto lerp = [&](const std::vector<double>& v) { return v[k] + (v[k + 1] - v[k]) * w; };
    return {lerp(a), lerp(b), lerp(c), lerp(d)};
  }
};

// H(p1, p2) = min over controls of (d1 p1 + l1 d1^2 + d2 p2 + l2 d2^2).
inline double hamiltonian(double p1, double p2, const ControlWeights& w) {
  return -p1 * p1 / (4.0 * w.lambda1) - p2 * p2 / (4.0 * w.lambda2);
}

namespace detail {

struct RiccatiRhs {
  double l1, l2, k3, k4, rr;  // rr = |rho_a * rho_l|
  double sa2, sl2;

  // Derivatives with respect to t of (a, b, c, d).
  std::array<double, 4> operator()(const std::array<double, 4>& y) const {
    const auto [a, b, c, d] = y;
    return {a * a / l1 + c * c / (4.0 * l2) - rr - k3,
            b * b / l2 + c * c / (4.0 * l1) - rr - k4,
            a * c / l1 + b * c / l2 + 2.0 * rr,
            -a * sa2 - b * sl2};
  }
};

inline constexpr double kCoefBound = 1e6;

inline bool coef_ok(const std::array<double, 4>& y) {
  for (int i = 0; i < 3; ++i)
    if (!std::isfinite(y[i]) || std::abs(y[i]) > kCoefBound) return false;
  return std::isfinite(y[3]);
}

}  // namespace detail

// Integrates the final-value coefficient system backward from T1 with the
// classical 4th-order one-step method on the reversed-time system. Throws
// blowup_error when no global solution exists down to t = 0.
inline RiccatiSolution solve_riccati(const ControlWeights& w, double rho_a, double rho_l,
                                     double sigma_a, double sigma_l, double T1, int n_steps) {
  w.validate();
  if (!(std::abs(rho_a) < 1.0 && std::abs(rho_l) < 1.0))
    throw std::domain_error("solve_riccati: requires |rho| < 1");
  if (!(T1 > 0.0)) throw std::domain_error("solve_riccati: requires T1 > 0");
  if (n_steps < 100) throw std::domain_error("solve_riccati: requires n_steps >= 100");

  const detail::RiccatiRhs rhs{w.lambda1,
                               w.lambda2,
                               w.lambda3 * (1.0 - std::abs(rho_a)),
                               w.lambda4 * (1.0 - std::abs(rho_l)),
                               std::abs(rho_a * rho_l),
                               sigma_a * sigma_a,
                               sigma_l * sigma_l};

  RiccatiSolution sol;
  sol.T1 = T1;
  sol.t.resize(n_steps + 1);
  sol.a.resize(n_steps + 1);
  sol.b.resize(n_steps + 1);
  sol.c.resize(n_steps + 1);
  sol.d.resize(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k)
    sol.t[k] = (k == n_steps) ? T1 : T1 * (static_cast<double>(k) / n_steps);

  const double h = T1 / n_steps;  // step in reversed time u = T1 - t
  std::array<double, 4> y{0.0, 0.0, 0.0, 0.0};
  auto store = [&](int grid_index) {
    sol.a[grid_index] = y[0];
    sol.b[grid_index] = y[1];
    sol.c[grid_index] = y[2];
    sol.d[grid_index] = y[3];
  };
  store(n_steps);  // final values at t = T1

  auto back = [&](const std::array<double, 4>& v) {
    auto f = rhs(v);
    for (double& x : f) x = -x;  // dy/du = -dy/dt
    return f;
  };
  for (int j = 1; j <= n_steps; ++j) {
    const auto k1 = back(y);
    std::array<double, 4> tmp;
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = back(tmp);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = back(tmp);
    for (int i = 0; i < 4; ++i) tmp[i] = y[i] + h * k3[i];
    const auto k4 = back(tmp);
    for (int i = 0; i < 4; ++i)
      y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!detail::coef_ok(y))
      throw blowup_error("solve_riccati: no global solution on [0, T1]");
    store(n_steps - j);
  }
  return sol;
}

// Max absolute residual of the four coefficient equations on the interior
// grid, with central differences; the cheap certificate that a returned
// solution actually solves the system.
inline double riccati_residual_max(const RiccatiSolution& sol, const ControlWeights& w,
                                   double rho_a, double rho_l, double sigma_a, double sigma_l) {
  const detail::RiccatiRhs rhs{w.lambda1,
                               w.lambda2,
                               w.lambda3 * (1.0 - std::abs(rho_a)),
                               w.lambda4 * (1.0 - std::abs(rho_l)),
                               std::abs(rho_a * rho_l),
                               sigma_a * sigma_a,
                               sigma_l * sigma_l};
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < sol.t.size(); ++k) {
    const double two_h = sol.t[k + 1] - sol.t[k - 1];
    const auto f = rhs({sol.a[k], sol.b[k], sol.c[k], sol.d[k]});
    const std::array<double, 4> dd{(sol.a[k + 1] - sol.a[k - 1]) / two_h,
                                   (sol.b[k + 1] - sol.b[k - 1]) / two_h,
                                   (sol.c[k + 1] - sol.c[k - 1]) / two_h,
                                   (sol.d[k + 1] - sol.d[k - 1]) / two_h};
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(dd[i] - f[i]));
  }
  return worst;
}

// Feedback law of the control problem, linear in the state.
struct Feedback {
  double beta1, beta2;
};

inline Feedback optimal_feedback(const RiccatiSolution& sol, const ControlWeights& w, double t,
                                 double Z, double S) {
  const auto v = sol.eval(t);
  return {-(2.0 * v.a * Z + v.c * S) / (2.0 * w.lambda1),
          -(2.0 * v.b * S + v.c * Z) / (2.0 * w.lambda2)};
}

// Coefficient matching of the feedback law against the cooperation drift
// form. alpha and gamma are clamped at zero where the matching turns them
// negative; g and h keep the matched (possibly negative) values, and vanish
// when the respective correlation is zero.
inline CooperationRates rates_from_riccati(const RiccatiSolution& sol, const ControlWeights& w,
                                           double rho_a, double rho_l) {
  if (!(std::abs(rho_a) < 1.0 && std::abs(rho_l) < 1.0))
    throw std::domain_error("rates_from_riccati: requires |rho| < 1");
  const double ra = std::abs(rho_a);
  const double rl = std::abs(rho_l);
  CooperationRates rates;
  rates.grid = sol.t;
  const std::size_t n = sol.t.size();
  rates.alpha.resize(n);
  rates.gamma.resize(n);
  rates.g.resize(n);
  rates.h.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double alpha = sol.a[k] / (w.lambda1 * (1.0 - ra));
    const double gamma = sol.b[k] / (w.lambda2 * (1.0 - rl));
    rates.alpha[k] = alpha < 0.0 ? 0.0 : alpha;
    rates.gamma[k] = gamma < 0.0 ? 0.0 : gamma;
    rates.g[k] = ra > 0.0 ? sol.c[k] / (2.0 * w.lambda1 * ra) : 0.0;
    rates.h[k] = rl > 0.0 ? sol.c[k] / (2.0 * w.lambda2 * rl) : 0.0;
  }
  return rates;
}

}  // namespace riskgov
