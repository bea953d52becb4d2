#pragma once

#include "json.hpp"
#include "meshsim/engine.hpp"

namespace meshsim {

/// Scenario as a JSON object (shared between the scenario serializer and the
/// report writer so both echo identical bytes).
nlohmann::ordered_json scenario_to_json(const ScenarioConfig& config);

}  // namespace meshsim
