// Command-line front end: binds scenario files to the simulation, control and
// governance engines and writes the result tables.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "riskgov/riskgov.hpp"

namespace {

void add_common(CLI::App* cmd, riskgov::RunManifest& m, bool scenario_required = true) {
  auto* opt = cmd->add_option("-s,--scenario", m.scenario_path, "scenario file (JSON)");
  if (scenario_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", m.out_dir, "output directory");
  cmd->add_option("--seed", m.seed, "master seed override");
  cmd->add_option("--paths", m.n_paths, "Monte Carlo path count override");
  cmd->add_option("--dt", m.dt, "time step override");
  cmd->add_option("--threads", m.threads, "worker cap (0 = hardware)");
  cmd->add_option("--set", m.overrides, "scenario override key.path=value")
      ->take_all();
}

int run(int argc, char** argv) {
  CLI::App app{"banking-system simulation and systemic-risk governance engine"};
  app.require_subcommand(1);

  riskgov::RunManifest loss, gov, ric, val;

  auto* cmd_loss = app.add_subcommand("loss-dist",
                                      "loss distributions of the coupled and uncoupled models");
  add_common(cmd_loss, loss);
  cmd_loss->add_option("--dump-paths", loss.dump_paths, "record trajectories of first k paths");
  cmd_loss->add_option("--dump-stride", loss.dump_stride, "trajectory decimation stride");

  auto* cmd_gov = app.add_subcommand("govern", "quarterly systemic-risk governance loop");
  add_common(cmd_gov, gov);
  cmd_gov->add_flag("--baseline", gov.baseline, "also run the no-governance reference");
  cmd_gov->add_option("--seeds", gov.seeds, "sweep this many consecutive master seeds")
      ->check(CLI::PositiveNumber);

  auto* cmd_ric = app.add_subcommand("riccati", "dump control coefficients and rates");
  add_common(cmd_ric, ric);

  auto* cmd_val = app.add_subcommand("validate", "run the built-in invariant suite");
  add_common(cmd_val, val, /*scenario_required=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : riskgov::kUsage;
  }

  if (cmd_loss->parsed()) riskgov::run_loss_dist(loss);
  if (cmd_gov->parsed()) riskgov::run_govern(gov);
  if (cmd_ric->parsed()) riskgov::run_riccati(ric);
  if (cmd_val->parsed() && !riskgov::run_validate(val))
    return riskgov::kValidationFailed;
  return riskgov::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const riskgov::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return riskgov::kParseError;
  } catch (const riskgov::blowup_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return riskgov::kBlowup;
  } catch (const riskgov::infeasible_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return riskgov::kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return riskgov::kInfeasible;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return riskgov::kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return riskgov::kBlowup;
  }
}
