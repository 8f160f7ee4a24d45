#pragma once

#include <string>

#include "fbgtpe/io/keyvalue.hpp"
#include "fbgtpe/simulator.hpp"

namespace fbgtpe::io {

sim::BendingScenario parse_scenario(const KeyValueFile& kv);
sim::BendingScenario load_scenario(const std::string& path);

std::string serialize_scenario(const sim::BendingScenario& scenario);
void save_scenario(const sim::BendingScenario& scenario, const std::string& path);

}  // namespace fbgtpe::io
