#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meshsim/protocol.hpp"
#include "meshsim/session.hpp"
#include "meshsim/world.hpp"

namespace meshsim {

/// One source→destination relay request, injected at the end of `start_slot`
/// (the session sends its first intent one slot later). Values ≤ 0 inject
/// before the loop starts.
struct SessionSpec {
    std::int64_t start_slot = 0;
    NodeId source = 0;
    NodeId destination = 0;

    friend bool operator==(const SessionSpec&, const SessionSpec&) = default;
};

/// Generator form of the session list: `count` random distinct (source,
/// destination) pairs with start slots drawn uniformly from [0, start_window].
struct SessionGenSpec {
    std::uint32_t count = 0;
    std::uint32_t start_window = 0;

    friend bool operator==(const SessionGenSpec&, const SessionGenSpec&) = default;
};

struct ScenarioConfig {
    WorldConfig world;
    ProtocolConfig protocol;
    std::uint32_t node_count = 0;          // used when explicit_nodes is empty
    std::vector<NodeState> explicit_nodes; // non-empty: the exact population, ids 0..N-1
    std::vector<SessionSpec> sessions;     // used when session_gen is absent
    std::optional<SessionGenSpec> session_gen;
    std::uint32_t max_slots = 1;
    std::uint64_t seed = 0;

    std::uint32_t effective_node_count() const {
        return explicit_nodes.empty() ? node_count
                                      : static_cast<std::uint32_t>(explicit_nodes.size());
    }
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct TransferRecord {
    SessionId session_id = 0;
    NodeId sender = 0;
    NodeId receiver = 0;
    TransferOutcome outcome;
    bool contended = false;  // executed as a contention winner rather than uncontended
};

struct StatusChange {
    SessionId session_id = 0;
    SessionStatus status;
};

/// Baseline-only events: one flood broadcast (a single transmission heard by
/// every current neighbor) and one per-receiver overlap of ≥2 broadcasts.
struct FloodBroadcast {
    SessionId session_id = 0;
    NodeId sender = 0;
};

struct FloodCollision {
    SessionId session_id = 0;
    NodeId receiver = 0;
};

/// Everything that happened in one slot, in execution order.
struct SlotLog {
    std::uint32_t slot = 0;
    std::vector<TransmitIntent> intents;        // pool order: deferred first, then fresh
    std::vector<ResolutionOutcome> resolutions; // one per contended receiver
    std::vector<TransferRecord> transfers;      // every executed transfer attempt
    std::vector<RecoveryRecord> recoveries;
    std::vector<StatusChange> status_changes;
    std::vector<SessionId> injections;
    std::vector<FloodBroadcast> flood_broadcasts;  // baseline runs only
    std::vector<FloodCollision> flood_collisions;  // baseline runs only
};

struct Metrics {
    std::uint64_t sessions_total = 0;
    std::uint64_t delivered = 0;
    std::uint64_t failed = 0;
    std::uint64_t in_flight_at_end = 0;
    std::uint64_t total_transmissions = 0;
    std::uint64_t total_collisions_detected = 0;
    std::uint64_t total_deferrals = 0;
    std::uint64_t total_recoveries = 0;
    std::vector<std::uint32_t> hop_counts;  // per delivered session, ascending session id
    double delivery_ratio = 0.0;            // 0 when sessions_total = 0

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct SessionSummary {
    SessionId id = 0;
    NodeId source = 0;
    NodeId destination = 0;
    std::int64_t start_slot = 0;
    SessionStatus status;
    std::uint32_t hop_count = 0;
    std::optional<std::uint32_t> end_slot;  // slot the session went terminal

    friend bool operator==(const SessionSummary&, const SessionSummary&) = default;
};

struct Report {
    ScenarioConfig scenario;
    Metrics metrics;
    std::vector<SessionSummary> sessions;
    std::vector<SlotLog> slots;
};

/// Builds the initial node population: the explicit list when given,
/// otherwise seeded uniform placement (position, heading, speed) with
/// priorities drawn on a separate stream.
std::vector<NodeState> materialize_nodes(const ScenarioConfig& config);

/// Builds the session list: the explicit list when given, otherwise seeded
/// distinct random pairs across the start window.
std::vector<SessionSpec> materialize_sessions(const ScenarioConfig& config);

/// Semantic validation; returns human-readable issues (empty = valid).
std::vector<std::string> validate_scenario(const ScenarioConfig& config);

/// Shortest hop distance between s and d over the snapshot's unit-disk
/// adjacency, or empty when they sit in different components.
std::optional<std::uint32_t> bfs_hop_distance(const TopologySnapshot& topo, NodeId s, NodeId d);

/// Recomputes the metrics block from raw slot logs and final session states.
Metrics collect_metrics(const std::vector<SlotLog>& logs,
                        const std::vector<SessionSummary>& sessions);

/// Runs the relay protocol over the full scenario. Throws ValidationError
/// when the config is invalid.
Report run_scenario(const ScenarioConfig& config);

/// Runs classic flooding on the same scenario: every node rebroadcasts a
/// session's packet exactly once, one slot after first receipt, to all
/// current neighbors; each flood runs to quiescence. Link loss and
/// contention do not apply — the point of the baseline is raw transmission
/// volume.
Report run_flooding_baseline(const ScenarioConfig& config);

}  // namespace meshsim
