#pragma once

#include <stdexcept>
#include <string>

namespace riskgov {

// Scenario file could not be read or is malformed.
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario is well-formed but violates a model constraint.
struct infeasible_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: Riccati blow-up, non-finite simulation state.
struct blowup_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace riskgov
