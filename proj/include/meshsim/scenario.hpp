#pragma once

#include <cstdint>
#include <string>

#include "meshsim/engine.hpp"

namespace meshsim {

/// Knobs for random scenario generation; everything is drawn from streams
/// derived from `seed`.
struct GeneratorParams {
    std::uint32_t node_count = 0;
    double width = 1000.0;
    double height = 1000.0;
    double range = 100.0;
    double speed_min = 0.0;
    double speed_max = 20.0;
    std::uint32_t session_count = 0;
    std::uint32_t start_window = 0;
    std::uint32_t max_slots = 200;
    std::uint64_t seed = 0;
};

/// Parses and validates a scenario document. Unknown keys anywhere are
/// rejected with their full path. Throws ScenarioParseError on malformed
/// JSON and ValidationError (with per-field messages) on schema or semantic
/// problems.
ScenarioConfig parse_scenario(const std::string& text);

/// Canonical JSON rendering; parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& config);

/// Builds a fully explicit scenario (concrete node list and session list)
/// from generator parameters. Running the result is identical to running
/// the equivalent count-form config with the same seed.
ScenarioConfig generate_scenario(const GeneratorParams& params);

}  // namespace meshsim
