#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "riskgov/rng.hpp"
#include "riskgov/risk_metrics.hpp"
#include "riskgov/sde_engine.hpp"

using namespace riskgov;
using Catch::Approx;

namespace {

// Hand-planted ensemble: default times drawn from a deterministic pattern so
// a brute-force recount is trivial to carry along.
PathEnsemble planted(int n_paths, int n_banks, std::uint64_t seed) {
  PathEnsemble ens;
  ens.n_paths = n_paths;
  ens.n_banks = n_banks;
  ens.t0 = 0.0;
  ens.t1 = 1.0;
  const std::size_t total = static_cast<std::size_t>(n_paths) * n_banks;
  ens.terminal_log_assets.assign(total, 0.0);
  ens.terminal_log_liabilities.assign(total, 0.0);
  ens.terminal_alive.assign(total, 1);
  ens.default_time.assign(total, kNoDefault);
  ens.path_valid.assign(n_paths, 1);
  const StreamKey key = derive_stream(seed, StreamDomain::validation, 0, 0);
  for (int p = 0; p < n_paths; ++p)
    for (int i = 0; i < n_banks; ++i) {
      const double u = riskgov::detail::to_unit(riskgov::detail::mix64(
          key.key ^ (static_cast<std::uint64_t>(p) * 1315423911u + i)));
      if (u < 0.4) {  // 40% of banks default, uniformly in time
        ens.default_time[static_cast<std::size_t>(p) * n_banks + i] = u / 0.4;
        ens.terminal_alive[static_cast<std::size_t>(p) * n_banks + i] = 0;
      }
    }
  return ens;
}

int recount_path(const PathEnsemble& ens, int p, double t1, double t2) {
  int k = 0;
  for (int i = 0; i < ens.n_banks; ++i) {
    const double td = ens.default_time[static_cast<std::size_t>(p) * ens.n_banks + i];
    if (!std::isnan(td) && td >= t1 && td <= t2) ++k;
  }
  return k;
}

}  // namespace

TEST_CASE("planted histogram matches a brute-force recount") {
  const auto ens = planted(100, 10, 5);
  const auto dist = loss_distribution(ens, 0.0, 1.0);
  REQUIRE(dist.counts.size() == 11);
  std::vector<std::int64_t> expected(11, 0);
  for (int p = 0; p < 100; ++p) ++expected[recount_path(ens, p, 0.0, 1.0)];
  CHECK(dist.counts == expected);
  std::int64_t total = 0;
  for (auto c : dist.counts) total += c;
  CHECK(total == 100);
  double psum = 0.0;
  for (double q : dist.probabilities()) psum += q;
  CHECK(psum == Approx(1.0).margin(1e-12));
}

TEST_CASE("sub-window counting respects closed bounds") {
  PathEnsemble ens = planted(1, 4, 1);
  // plant exact boundary times
  ens.default_time = {0.25, 0.75, 0.74999, 0.75001};
  ens.terminal_alive = {0, 0, 0, 0};
  const auto dist = loss_distribution(ens, 0.25, 0.75);
  CHECK(dist.counts[3] == 1);  // 0.25, 0.75 and 0.74999 inside; 0.75001 out
  CHECK_THROWS_AS(loss_distribution(ens, -0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(loss_distribution(ens, 0.5, 1.5), std::domain_error);
}

TEST_CASE("cumulative counts include banks that failed before the window") {
  PathEnsemble ens = planted(2, 5, 8);
  ens.t0 = 1.0;
  ens.t1 = 2.0;
  // path 0: two failures before the window opened, one inside it
  ens.default_time = {0.3, 0.9, 1.5, kNoDefault, kNoDefault,
                      kNoDefault, kNoDefault, kNoDefault, 2.0, kNoDefault};
  const auto windowed = per_path_default_counts(ens, 1.0, 2.0);
  CHECK(windowed == std::vector<int>{1, 1});
  const auto cumulative = cumulative_default_counts(ens, 2.0);
  CHECK(cumulative == std::vector<int>{3, 1});
  // the cumulative systemic event uses the same M bounds
  CHECK(systemic_risk_probability_cumulative(ens, 2.0, 3).probability == 0.5);
  CHECK_THROWS_AS(systemic_risk_probability_cumulative(ens, 2.0, 1), std::domain_error);
}

TEST_CASE("systemic risk probability equals the histogram tail mass") {
  const auto ens = planted(500, 10, 9);
  const auto dist = loss_distribution(ens, 0.0, 1.0);
  for (int m = 5; m <= 10; ++m) {
    const auto est = systemic_risk_probability(ens, 0.0, 1.0, m);
    CHECK(est.probability == dist.tail_probability(m));
    CHECK(est.standard_error ==
          Approx(std::sqrt(est.probability * (1 - est.probability) / 500.0)));
  }
}

TEST_CASE("tail probability is nonincreasing in the event size") {
  const auto ens = planted(500, 10, 13);
  double prev = 1.0;
  for (int m = 5; m <= 10; ++m) {
    const double p = systemic_risk_probability(ens, 0.0, 1.0, m).probability;
    CHECK(p <= prev);
    prev = p;
  }
}

TEST_CASE("default systemic size is int(N/2) + 1") {
  CHECK(default_systemic_size(10) == 6);
  CHECK(default_systemic_size(9) == 5);
  CHECK(default_systemic_size(100) == 51);
}

TEST_CASE("event size bounds are enforced") {
  const auto ens = planted(10, 10, 2);
  CHECK_THROWS_AS(systemic_risk_probability(ens, 0.0, 1.0, 4), std::domain_error);
  CHECK_THROWS_AS(systemic_risk_probability(ens, 0.0, 1.0, 11), std::domain_error);
  CHECK_NOTHROW(systemic_risk_probability(ens, 0.0, 1.0, 5));
  CHECK_NOTHROW(systemic_risk_probability(ens, 0.0, 1.0, 10));
}

TEST_CASE("saturated ensemble has probability one") {
  PathEnsemble ens = planted(50, 6, 3);
  for (auto& td : ens.default_time) td = 0.5;
  const auto est = systemic_risk_probability(ens, 0.0, 1.0, 4);
  CHECK(est.probability == 1.0);
  CHECK(est.standard_error == 0.0);
}

TEST_CASE("homogeneous population: per-bank estimates agree") {
  ModelParams p;
  p.n_banks = 10;
  p.mu_a = 0.1;
  p.mu_l = 0.1;
  p.a0 = 0.1;
  p.l0 = 0.06;
  p.sigma_a = Schedule::constant(0.0, 0.8);
  p.sigma_l = Schedule::constant(0.0, 0.6);
  p.rho_a = Schedule::constant(0.0, 0.0);
  p.rho_l = Schedule::constant(0.0, 0.0);
  const auto rates = CooperationRates::constant(0.0, 1.0, 100.0, 100.0);
  const auto ideal = IdealBankPath::constant(0.0, 1.0, 0.1, 0.06);
  const auto ens = simulate(p, rates, ideal, 0.0, 1.0, SystemState::initial(p, 0.0), 2000,
                            2e-3, 4242, StreamDomain::validation, 30);
  const auto e1 = individual_default_probability(ens, 0.0, 1.0, 1);
  const auto e2 = individual_default_probability(ens, 0.0, 1.0, 2);
  const double joint = std::sqrt(e1.standard_error * e1.standard_error +
                                 e2.standard_error * e2.standard_error);
  CHECK(std::abs(e1.probability - e2.probability) < 4.0 * joint);
}

TEST_CASE("individual default probability recounts one bank") {
  const auto ens = planted(200, 10, 21);
  for (int bank : {0, 3, 9}) {
    int hits = 0;
    for (int p = 0; p < 200; ++p) {
      const double td = ens.default_time[static_cast<std::size_t>(p) * 10 + bank];
      hits += !std::isnan(td) && td >= 0.0 && td <= 1.0;
    }
    const auto est = individual_default_probability(ens, 0.0, 1.0, bank);
    CHECK(est.probability == Approx(static_cast<double>(hits) / 200.0));
  }
  CHECK_THROWS_AS(individual_default_probability(ens, 0.0, 1.0, -1), std::domain_error);
  CHECK_THROWS_AS(individual_default_probability(ens, 0.0, 1.0, 10), std::domain_error);
}
