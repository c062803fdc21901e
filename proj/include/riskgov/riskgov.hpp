#pragma once

// Umbrella header for the banking-system simulation and governance engine.

#include "riskgov/errors.hpp"
#include "riskgov/governance.hpp"
#include "riskgov/ideal_bank.hpp"
#include "riskgov/noise.hpp"
#include "riskgov/params.hpp"
#include "riskgov/pseudo_mf.hpp"
#include "riskgov/rates.hpp"
#include "riskgov/riccati.hpp"
#include "riskgov/risk_metrics.hpp"
#include "riskgov/rng.hpp"
#include "riskgov/runner.hpp"
#include "riskgov/scenario.hpp"
#include "riskgov/schedule.hpp"
#include "riskgov/sde_engine.hpp"
#include "riskgov/state.hpp"
#include "riskgov/table_io.hpp"
#include "riskgov/version.hpp"
