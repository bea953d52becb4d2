#include "meshsim/scenario.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "meshsim/errors.hpp"
#include "scenario_json.hpp"

namespace meshsim {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void coerce_number(const std::string& path, const json& v, double& out,
                   std::vector<std::string>& issues) {
    if (!v.is_number()) {
        issues.push_back(path + ": expected a number");
        return;
    }
    out = v.get<double>();
}

template <typename T>
void coerce_uint(const std::string& path, const json& v, T& out,
                 std::vector<std::string>& issues) {
    const bool negative =
        v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0;
    if ((!v.is_number_integer() && !v.is_number_unsigned()) || negative) {
        issues.push_back(path + ": expected a non-negative integer");
        return;
    }
    const std::uint64_t raw = v.get<std::uint64_t>();
    if (raw > std::numeric_limits<T>::max()) {
        issues.push_back(path + ": value too large");
        return;
    }
    out = static_cast<T>(raw);
}

/// Strict reader over one JSON object: typed getters record a field-path
/// message for every problem, and finish() flags keys nobody asked about.
class ObjectReader {
  public:
    ObjectReader(const json& value, std::string path, std::vector<std::string>& issues)
        : value_(value), path_(std::move(path)), issues_(issues) {}

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = value_.find(key);
        return it == value_.end() ? nullptr : &*it;
    }

    const json* require(const std::string& key) {
        const json* v = find(key);
        if (!v) complain(key, "required key missing");
        return v;
    }

    void read_number(const std::string& key, double& out) {
        if (const json* v = find(key)) coerce_number(key_path(key), *v, out, issues_);
    }

    template <typename T>
    void read_uint(const std::string& key, T& out) {
        if (const json* v = find(key)) coerce_uint(key_path(key), *v, out, issues_);
    }

    void read_int64(const std::string& key, std::int64_t& out) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_number_integer() && !v->is_number_unsigned()) {
            complain(key, "expected an integer");
            return;
        }
        out = v->get<std::int64_t>();
    }

    void complain(const std::string& key, const std::string& message) {
        issues_.push_back(key_path(key) + ": " + message);
    }

    std::string key_path(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() {
        for (const auto& item : value_.items()) {
            if (!seen_.count(item.key())) complain(item.key(), "unknown key");
        }
    }

  private:
    const json& value_;
    std::string path_;
    std::vector<std::string>& issues_;
    std::set<std::string> seen_;
};

void parse_world(const json& value, WorldConfig& world, std::vector<std::string>& issues) {
    if (!value.is_object()) {
        issues.push_back("world: expected an object");
        return;
    }
    ObjectReader r(value, "world", issues);
    r.read_number("width", world.width);
    r.read_number("height", world.height);
    r.read_number("range", world.range);
    r.read_number("speed_min", world.speed_min);
    r.read_number("speed_max", world.speed_max);
    r.read_number("slot_duration", world.slot_duration);
    r.finish();
}

void parse_protocol(const json& value, ProtocolConfig& protocol,
                    std::vector<std::string>& issues) {
    if (!value.is_object()) {
        issues.push_back("protocol: expected an object");
        return;
    }
    ObjectReader r(value, "protocol", issues);
    r.read_uint("recovery_limit", protocol.recovery_limit);
    r.read_number("link_loss_probability", protocol.link_loss_probability);
    r.finish();
}

void parse_nodes(const json& value, ScenarioConfig& config, std::vector<std::string>& issues) {
    if (value.is_number()) {
        coerce_uint("nodes", value, config.node_count, issues);
        return;
    }
    if (!value.is_array()) {
        issues.push_back("nodes: expected a count or an array of node objects");
        return;
    }
    for (std::size_t k = 0; k < value.size(); ++k) {
        const std::string path = "nodes[" + std::to_string(k) + "]";
        if (!value[k].is_object()) {
            issues.push_back(path + ": expected an object");
            continue;
        }
        ObjectReader r(value[k], path, issues);
        NodeState node;
        if (const json* v = r.require("id")) coerce_uint(r.key_path("id"), *v, node.id, issues);
        if (const json* v = r.require("x")) {
            coerce_number(r.key_path("x"), *v, node.position.x, issues);
        }
        if (const json* v = r.require("y")) {
            coerce_number(r.key_path("y"), *v, node.position.y, issues);
        }
        r.read_number("vx", node.velocity.vx);
        r.read_number("vy", node.velocity.vy);
        r.read_number("priority", node.priority);
        r.finish();
        config.explicit_nodes.push_back(node);
    }
}

void parse_sessions(const json& value, ScenarioConfig& config,
                    std::vector<std::string>& issues) {
    if (value.is_object()) {
        ObjectReader r(value, "sessions", issues);
        SessionGenSpec gen;
        if (const json* v = r.require("count")) {
            coerce_uint(r.key_path("count"), *v, gen.count, issues);
        }
        r.read_uint("start_window", gen.start_window);
        r.finish();
        config.session_gen = gen;
        return;
    }
    if (!value.is_array()) {
        issues.push_back("sessions: expected an array or a generator object");
        return;
    }
    for (std::size_t k = 0; k < value.size(); ++k) {
        const std::string path = "sessions[" + std::to_string(k) + "]";
        if (!value[k].is_object()) {
            issues.push_back(path + ": expected an object");
            continue;
        }
        ObjectReader r(value[k], path, issues);
        SessionSpec spec;
        r.read_int64("start_slot", spec.start_slot);
        if (const json* v = r.require("source")) {
            coerce_uint(r.key_path("source"), *v, spec.source, issues);
        }
        if (const json* v = r.require("destination")) {
            coerce_uint(r.key_path("destination"), *v, spec.destination, issues);
        }
        r.finish();
        config.sessions.push_back(spec);
    }
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioParseError(e.what());
    }
    if (!doc.is_object()) throw ValidationError({"top level: expected an object"});

    ScenarioConfig config;
    std::vector<std::string> issues;
    ObjectReader root(doc, "", issues);

    if (const json* v = root.find("world")) parse_world(*v, config.world, issues);
    if (const json* v = root.find("protocol")) parse_protocol(*v, config.protocol, issues);
    if (const json* v = root.require("nodes")) parse_nodes(*v, config, issues);
    if (const json* v = root.require("sessions")) parse_sessions(*v, config, issues);
    if (const json* v = root.require("max_slots")) {
        coerce_uint("max_slots", *v, config.max_slots, issues);
    }
    if (const json* v = root.require("seed")) coerce_uint("seed", *v, config.seed, issues);
    root.finish();

    if (!issues.empty()) throw ValidationError(std::move(issues));

    auto semantic = validate_scenario(config);
    if (!semantic.empty()) throw ValidationError(std::move(semantic));
    return config;
}

std::string serialize_scenario(const ScenarioConfig& config) {
    return scenario_to_json(config).dump(2) + "\n";
}

ordered_json scenario_to_json(const ScenarioConfig& config) {
    ordered_json doc;
    doc["world"] = {{"width", config.world.width},
                    {"height", config.world.height},
                    {"range", config.world.range},
                    {"speed_min", config.world.speed_min},
                    {"speed_max", config.world.speed_max},
                    {"slot_duration", config.world.slot_duration}};
    doc["protocol"] = {{"recovery_limit", config.protocol.recovery_limit},
                       {"link_loss_probability", config.protocol.link_loss_probability}};

    if (config.explicit_nodes.empty()) {
        doc["nodes"] = config.node_count;
    } else {
        auto nodes = ordered_json::array();
        for (const auto& n : config.explicit_nodes) {
            nodes.push_back({{"id", n.id},
                             {"x", n.position.x},
                             {"y", n.position.y},
                             {"vx", n.velocity.vx},
                             {"vy", n.velocity.vy},
                             {"priority", n.priority}});
        }
        doc["nodes"] = std::move(nodes);
    }

    if (config.session_gen) {
        doc["sessions"] = {{"count", config.session_gen->count},
                           {"start_window", config.session_gen->start_window}};
    } else {
        auto sessions = ordered_json::array();
        for (const auto& s : config.sessions) {
            sessions.push_back({{"start_slot", s.start_slot},
                                {"source", s.source},
                                {"destination", s.destination}});
        }
        doc["sessions"] = std::move(sessions);
    }

    doc["max_slots"] = config.max_slots;
    doc["seed"] = config.seed;
    return doc;
}

ScenarioConfig generate_scenario(const GeneratorParams& params) {
    ScenarioConfig seeded;
    seeded.world.width = params.width;
    seeded.world.height = params.height;
    seeded.world.range = params.range;
    seeded.world.speed_min = params.speed_min;
    seeded.world.speed_max = params.speed_max;
    seeded.node_count = params.node_count;
    seeded.session_gen = SessionGenSpec{params.session_count, params.start_window};
    seeded.max_slots = params.max_slots;
    seeded.seed = params.seed;

    auto issues = validate_scenario(seeded);
    if (!issues.empty()) throw ValidationError(std::move(issues));

    ScenarioConfig out = seeded;
    out.explicit_nodes = materialize_nodes(seeded);
    out.node_count = 0;
    out.sessions = materialize_sessions(seeded);
    out.session_gen.reset();
    return out;
}

}  // namespace meshsim
