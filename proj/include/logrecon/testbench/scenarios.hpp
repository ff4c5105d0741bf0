#pragma once

#include "logrecon/testbench/workload.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Replays of the four experimental procedures at desk scale. Row counts scale,
// the tampered key ranges do not, so finding counts stay fixed.
namespace logrecon::testbench {

struct ScenarioParams {
  double scale = 1.0;
  std::uint64_t seed = 7;
};

struct Scenario {
  std::string name;
  Engine engine = Engine::Append;
  std::vector<Step> steps;
};

// exp2a, exp2b, exp3, exp4, exp4-doc
std::vector<std::string> scenario_names();

// Throws ConfigError for an unknown name.
Scenario make_scenario(std::string_view name, const ScenarioParams& params = {});

}  // namespace logrecon::testbench
