#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "riskgov/riccati.hpp"
#include "riskgov/rng.hpp"

using namespace riskgov;
using Catch::Approx;

namespace {

double rand_in(StreamKey key, std::uint64_t step, std::uint64_t slot, double lo, double hi) {
  using namespace riskgov::detail;
  const double u =
      to_unit(mix64(mix64(key.key ^ (kStepMul * (step + 1))) ^ (kSlotMul * (slot + 1))));
  return lo + (hi - lo) * u;
}

// scalar closed form for the decoupled case rho_a = rho_l = 0:
// a(t) = sqrt(l1 l3) tanh(sqrt(l3/l1) (T1 - t))
double tanh_solution(double l1, double l3, double T1, double t) {
  return std::sqrt(l1 * l3) * std::tanh(std::sqrt(l3 / l1) * (T1 - t));
}

}  // namespace

TEST_CASE("hamiltonian closed form and brute-force minimizer") {
  ControlWeights w{0.1, 0.25, 0.1, 0.1};
  CHECK(hamiltonian(0.0, 0.0, w) == 0.0);
  CHECK(hamiltonian(1.0, 0.0, w) == Approx(-2.5));

  // grid-search oracle: the quadratic in (d1, d2) is minimized at
  // (-p1/(2 l1), -p2/(2 l2)) and the minimum equals the closed form
  const double p1 = 0.7, p2 = -1.3;
  auto objective = [&](double d1, double d2) {
    return d1 * p1 + w.lambda1 * d1 * d1 + d2 * p2 + w.lambda2 * d2 * d2;
  };
  double best = 1e300, best_d1 = 0, best_d2 = 0;
  for (int i = -400; i <= 400; ++i)
    for (int j = -400; j <= 400; ++j) {
      const double v = objective(i * 0.01, j * 0.01);
      if (v < best) {
        best = v;
        best_d1 = i * 0.01;
        best_d2 = j * 0.01;
      }
    }
  CHECK(best_d1 == Approx(-p1 / (2 * w.lambda1)).margin(0.011));
  CHECK(best_d2 == Approx(-p2 / (2 * w.lambda2)).margin(0.011));
  CHECK(hamiltonian(p1, p2, w) == Approx(best).margin(1e-4));
}

TEST_CASE("decoupled case matches the scalar closed form") {
  ControlWeights w{0.1, 0.1, 0.1, 0.1};
  const auto sol = solve_riccati(w, 0.0, 0.0, 0.3, 0.3, 1.0, 10000);
  CHECK(std::abs(sol.a.front() - 0.1 * std::tanh(1.0)) < 1e-8);
  for (std::size_t k = 0; k < sol.t.size(); k += 500)
    CHECK(std::abs(sol.a[k] - tanh_solution(0.1, 0.1, 1.0, sol.t[k])) < 1e-8);
  // c = 0 solves its equation when either correlation vanishes
  for (double c : sol.c) CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("terminal coefficients vanish exactly") {
  ControlWeights w{0.2, 0.3, 0.15, 0.12};
  const auto sol = solve_riccati(w, 0.4, 0.6, 0.5, 0.7, 1.3, 1000);
  CHECK(sol.a.back() == 0.0);
  CHECK(sol.b.back() == 0.0);
  CHECK(sol.c.back() == 0.0);
  CHECK(sol.d.back() == 0.0);
}

TEST_CASE("residuals stay small over a random admissible sweep") {
  const StreamKey key = derive_stream(1234, StreamDomain::validation, 0, 0);
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    ControlWeights w{rand_in(key, s, 0, 0.05, 0.5), rand_in(key, s, 1, 0.05, 0.5),
                     rand_in(key, s, 2, 0.05, 0.5), rand_in(key, s, 3, 0.05, 0.5)};
    const double ra = rand_in(key, s, 4, 0.0, 0.8);
    const double rl = rand_in(key, s, 5, 0.0, 0.8);
    const double sa = rand_in(key, s, 6, 0.2, 1.0);
    const double sl = rand_in(key, s, 7, 0.2, 1.0);
    const double T1 = rand_in(key, s, 8, 0.5, 2.0);
    const auto sol = solve_riccati(w, ra, rl, sa, sl, T1, 10000);
    worst = std::max(worst, riccati_residual_max(sol, w, ra, rl, sa, sl));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("corrupted grid fails the residual check") {
  ControlWeights w{0.1, 0.1, 0.1, 0.1};
  auto sol = solve_riccati(w, 0.3, 0.5, 0.4, 0.4, 1.0, 2000);
  REQUIRE(riccati_residual_max(sol, w, 0.3, 0.5, 0.4, 0.4) < 1e-6);
  sol.a[1000] += 1e-3;  // negative control
  CHECK(riccati_residual_max(sol, w, 0.3, 0.5, 0.4, 0.4) > 1e-6);
}

TEST_CASE("step halving shows fourth-order convergence") {
  ControlWeights w{0.15, 0.08, 0.2, 0.3};
  const double ra = 0.5, rl = 0.7, sa = 0.6, sl = 0.4, T1 = 1.0;
  const auto coarse = solve_riccati(w, ra, rl, sa, sl, T1, 200);
  const auto fine = solve_riccati(w, ra, rl, sa, sl, T1, 400);
  const auto exact = solve_riccati(w, ra, rl, sa, sl, T1, 51200);
  const double e_coarse = std::abs(coarse.a.front() - exact.a.front()) +
                          std::abs(coarse.b.front() - exact.b.front()) +
                          std::abs(coarse.c.front() - exact.c.front());
  const double e_fine = std::abs(fine.a.front() - exact.a.front()) +
                        std::abs(fine.b.front() - exact.b.front()) +
                        std::abs(fine.c.front() - exact.c.front());
  const double ratio = e_coarse / e_fine;
  CHECK(ratio > 16.0 * 0.7);
  CHECK(ratio < 16.0 * 1.3);
}

TEST_CASE("input validation") {
  ControlWeights w{0.1, 0.1, 0.1, 0.1};
  CHECK_THROWS_AS(solve_riccati(w, 1.0, 0.0, 0.3, 0.3, 1.0, 1000), std::domain_error);
  CHECK_THROWS_AS(solve_riccati(w, 0.0, -1.0, 0.3, 0.3, 1.0, 1000), std::domain_error);
  CHECK_THROWS_AS(solve_riccati(w, 0.0, 0.0, 0.3, 0.3, -1.0, 1000), std::domain_error);
  CHECK_THROWS_AS(solve_riccati(w, 0.0, 0.0, 0.3, 0.3, 1.0, 50), std::domain_error);
  CHECK_THROWS_AS(solve_riccati(ControlWeights{0.0, 0.1, 0.1, 0.1}, 0.0, 0.0, 0.3, 0.3, 1.0,
                                1000),
                  infeasible_error);
}

TEST_CASE("coefficient magnitude guard aborts as no-global-solution") {
  // positive weights this extreme push a past the declared 1e6 bound
  ControlWeights w{0.1, 0.1, 1e15, 0.1};
  CHECK_THROWS_AS(solve_riccati(w, 0.0, 0.0, 0.3, 0.3, 1.0, 1000), blowup_error);
}

TEST_CASE("feedback is linear, vanishes at the horizon, and matches the value gradient") {
  ControlWeights w{0.12, 0.3, 0.25, 0.18};
  const double ra = 0.45, rl = 0.3;
  const auto sol = solve_riccati(w, ra, rl, 0.5, 0.6, 1.0, 10000);

  const auto zero = optimal_feedback(sol, w, 0.4, 0.0, 0.0);
  CHECK(zero.beta1 == 0.0);
  CHECK(zero.beta2 == 0.0);
  const auto horizon = optimal_feedback(sol, w, 1.0, 2.0, -3.0);
  CHECK(horizon.beta1 == 0.0);
  CHECK(horizon.beta2 == 0.0);
  CHECK_THROWS_AS(optimal_feedback(sol, w, 1.5, 0.0, 0.0), std::domain_error);

  // finite-difference oracle: beta1 = -(dV/dZ) / (2 l1) for the quadratic V
  const StreamKey key = derive_stream(99, StreamDomain::validation, 0, 0);
  auto value = [&](double t, double Z, double S) {
    const auto v = sol.eval(t);
    return v.a * Z * Z + v.b * S * S + v.c * Z * S + v.d;
  };
  for (int i = 0; i < 40; ++i) {
    const double t = rand_in(key, i, 0, 0.0, 1.0);
    const double Z = rand_in(key, i, 1, -2.0, 2.0);
    const double S = rand_in(key, i, 2, -2.0, 2.0);
    const double eps = 1e-6;
    const double dVdZ = (value(t, Z + eps, S) - value(t, Z - eps, S)) / (2 * eps);
    const double dVdS = (value(t, Z, S + eps) - value(t, Z, S - eps)) / (2 * eps);
    const auto fb = optimal_feedback(sol, w, t, Z, S);
    CHECK(fb.beta1 == Approx(-dVdZ / (2 * w.lambda1)).margin(1e-6));
    CHECK(fb.beta2 == Approx(-dVdS / (2 * w.lambda2)).margin(1e-6));
  }

  // d never affects the feedback
  auto perturbed = sol;
  for (double& d : perturbed.d) d += 17.0;
  for (int i = 0; i < 10; ++i) {
    const double t = rand_in(key, 100 + i, 0, 0.0, 1.0);
    const double Z = rand_in(key, 100 + i, 1, -2.0, 2.0);
    const double S = rand_in(key, 100 + i, 2, -2.0, 2.0);
    const auto fb0 = optimal_feedback(sol, w, t, Z, S);
    const auto fb1 = optimal_feedback(perturbed, w, t, Z, S);
    CHECK(fb0.beta1 == fb1.beta1);
    CHECK(fb0.beta2 == fb1.beta2);
  }
}

TEST_CASE("rate extraction: closed form, symmetry, clamping and round trip") {
  SECTION("decoupled tanh value") {
    ControlWeights w{0.1, 0.1, 0.1, 0.1};
    const auto sol = solve_riccati(w, 0.0, 0.0, 0.3, 0.3, 1.0, 10000);
    const auto rates = rates_from_riccati(sol, w, 0.0, 0.0);
    CHECK(rates.alpha.front() == Approx(std::tanh(1.0)).epsilon(1e-8));
    for (std::size_t k = 0; k < rates.grid.size(); k += 1000) {
      CHECK(rates.g[k] == 0.0);
      CHECK(rates.h[k] == 0.0);
    }
  }

  SECTION("symmetric problem gives alpha == gamma") {
    ControlWeights w{0.2, 0.2, 0.3, 0.3};
    const auto sol = solve_riccati(w, 0.5, 0.5, 0.4, 0.4, 1.0, 5000);
    const auto rates = rates_from_riccati(sol, w, 0.5, 0.5);
    for (std::size_t k = 0; k < rates.grid.size(); k += 500)
      CHECK(rates.alpha[k] == Approx(rates.gamma[k]).margin(1e-13));
  }

  SECTION("clamping keeps alpha and gamma nonnegative") {
    // synthetic negative dip exercises the clamp in isolation
    RiccatiSolution sol;
    sol.T1 = 1.0;
    sol.t = {0.0, 0.5, 1.0};
    sol.a = {-0.2, 0.1, 0.0};
    sol.b = {0.3, -0.4, 0.0};
    sol.c = {-0.1, -0.05, 0.0};
    sol.d = {0.0, 0.0, 0.0};
    ControlWeights w{0.1, 0.1, 0.1, 0.1};
    const auto rates = rates_from_riccati(sol, w, 0.5, 0.5);
    CHECK(rates.alpha[0] == 0.0);
    CHECK(rates.alpha[1] == Approx(0.1 / (0.1 * 0.5)));
    CHECK(rates.gamma[1] == 0.0);
    CHECK(rates.g[0] == Approx(-0.1 / (2 * 0.1 * 0.5)));
    rates.validate();
  }

  SECTION("round trip: rebuilt drift equals the feedback law in coefficients") {
    ControlWeights w{0.15, 0.25, 0.2, 0.1};
    const double ra = 0.6, rl = 0.35;
    const auto sol = solve_riccati(w, ra, rl, 0.5, 0.5, 1.0, 4000);
    const auto rates = rates_from_riccati(sol, w, ra, rl);
    for (std::size_t k = 0; k < sol.t.size(); ++k) {
      if (sol.a[k] < 0.0 || sol.b[k] < 0.0) continue;  // clamped points suspended
      // beta_a Z-coefficient: alpha (1-|ra|) vs 2a/(2 l1); S-coefficient:
      // |ra| g vs c/(2 l1); and the liabilities analogues
      CHECK(std::abs(rates.alpha[k] * (1.0 - ra) - sol.a[k] / w.lambda1) < 1e-12);
      CHECK(std::abs(ra * rates.g[k] - sol.c[k] / (2.0 * w.lambda1)) < 1e-12);
      CHECK(std::abs(rates.gamma[k] * (1.0 - rl) - sol.b[k] / w.lambda2) < 1e-12);
      CHECK(std::abs(rl * rates.h[k] - sol.c[k] / (2.0 * w.lambda2)) < 1e-12);
    }
  }

  SECTION("correlation bounds") {
    ControlWeights w{0.1, 0.1, 0.1, 0.1};
    const auto sol = solve_riccati(w, 0.0, 0.0, 0.3, 0.3, 1.0, 1000);
    CHECK_THROWS_AS(rates_from_riccati(sol, w, 1.0, 0.0), std::domain_error);
  }
}
