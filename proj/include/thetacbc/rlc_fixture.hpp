#pragma once

#include <string_view>

#include "thetacbc/scenario.hpp"

namespace thetacbc {

/// RLC circuit benchmark (Delta = 0.05, R = 2, L = 9, C = 0.5) with the
/// published gain, P_x and P_theta rule. Same text as scenarios/rlc_circuit.json.
std::string_view rlc_scenario_json();

Scenario rlc_scenario();

}  // namespace thetacbc
