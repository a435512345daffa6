#include "thetacbc/rlc_fixture.hpp"

#include "thetacbc/scenario_io.hpp"

namespace thetacbc {

namespace {

constexpr std::string_view kRlcScenario = R"json({
  "label": "rlc_circuit",
  "system": {
    "A": [[0.9888888888888889, -0.005555555555555556], [0.1, 1.0]],
    "B": [[1.0, 0.0], [0.0, 1.0]],
    "sigma_w": 0.2
  },
  "gain": {
    "L": [[-0.0337, -0.04], [-0.0401, -0.0476]]
  },
  "certificate": {
    "P_x": [[0.0133, 0.0], [0.0, 0.012]],
    "P_theta": {"rule": "sigma_i_power", "p11": 1e-06, "scale": 0.000157, "floor": 1e-08}
  },
  "init_set": {
    "center": [0.0, 0.0],
    "size": 0.4,
    "kernel": {"type": "ball"},
    "perturbation": {"type": "half_normal", "sigma": 0.1}
  },
  "unsafe_set": {
    "center": [4.0, 4.0],
    "size": 1.0,
    "kernel": {"type": "ball"},
    "perturbation": {"type": "half_normal", "sigma": 1.0}
  },
  "horizon": 50,
  "state_bounds": {
    "lower": [-4.0, -4.0],
    "upper": [10.0, 10.0]
  },
  "sweep": {
    "sigma_w": [0.01, 0.05, 0.1, 0.15, 0.2],
    "sigma_i": [0.5, 0.75, 1.0, 1.5, 1.75],
    "sigma_u": [0.1, 0.5, 0.75, 1.0, 1.5, 1.75]
  }
}
)json";

}  // namespace

std::string_view rlc_scenario_json() { return kRlcScenario; }

Scenario rlc_scenario() { return parse_scenario(kRlcScenario); }

}  // namespace thetacbc
