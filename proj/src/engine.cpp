#include "meshsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <numbers>

#include "meshsim/errors.hpp"
#include "meshsim/geometry.hpp"
#include "meshsim/rng.hpp"

namespace meshsim {

namespace {

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return buf;
}

void check_session_endpoints(const std::vector<SessionSpec>& specs, std::uint32_t node_count,
                             std::vector<std::string>& issues) {
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const auto& s = specs[k];
        if (s.source >= node_count) {
            issues.push_back(fmt("sessions[%zu].source: node id %u out of range (%u nodes)", k,
                                 s.source, node_count));
        }
        if (s.destination >= node_count) {
            issues.push_back(fmt("sessions[%zu].destination: node id %u out of range (%u nodes)",
                                 k, s.destination, node_count));
        }
        if (s.source == s.destination) {
            issues.push_back(
                fmt("sessions[%zu]: source and destination must differ (both %u)", k, s.source));
        }
    }
}

}  // namespace

std::vector<std::string> validate_scenario(const ScenarioConfig& config) {
    std::vector<std::string> issues;
    const auto& w = config.world;

    if (!(w.width > 0)) issues.push_back(fmt("world.width: must be positive, got %g", w.width));
    if (!(w.height > 0)) issues.push_back(fmt("world.height: must be positive, got %g", w.height));
    if (!(w.range > 0)) issues.push_back(fmt("world.range: must be positive, got %g", w.range));
    if (!(w.slot_duration > 0)) {
        issues.push_back(fmt("world.slot_duration: must be positive, got %g", w.slot_duration));
    }
    if (w.speed_min < 0 || w.speed_max < w.speed_min) {
        issues.push_back(fmt("world.speed_min/speed_max: need 0 <= min <= max, got %g..%g",
                             w.speed_min, w.speed_max));
    }
    if (config.protocol.recovery_limit < 1) {
        issues.push_back("protocol.recovery_limit: must be at least 1");
    }
    if (config.protocol.link_loss_probability < 0 || config.protocol.link_loss_probability > 1) {
        issues.push_back(fmt("protocol.link_loss_probability: must be in [0,1], got %g",
                             config.protocol.link_loss_probability));
    }
    if (config.max_slots < 1) issues.push_back("max_slots: must be at least 1");

    const std::uint32_t n = config.effective_node_count();
    if (n < 2) issues.push_back(fmt("nodes: need at least 2, got %u", n));

    if (!config.explicit_nodes.empty()) {
        std::vector<bool> seen(config.explicit_nodes.size(), false);
        for (std::size_t k = 0; k < config.explicit_nodes.size(); ++k) {
            const auto& node = config.explicit_nodes[k];
            if (node.id >= config.explicit_nodes.size()) {
                issues.push_back(fmt("nodes[%zu].id: ids must be dense 0..%zu, got %u", k,
                                     config.explicit_nodes.size() - 1, node.id));
            } else if (seen[node.id]) {
                issues.push_back(fmt("nodes[%zu].id: duplicate id %u", k, node.id));
            } else {
                seen[node.id] = true;
            }
            if (node.position.x < 0 || node.position.x > w.width || node.position.y < 0 ||
                node.position.y > w.height) {
                issues.push_back(fmt("nodes[%zu]: position (%g, %g) outside world %gx%g", k,
                                     node.position.x, node.position.y, w.width, w.height));
            }
            if (node.priority < 0 || node.priority > 1) {
                issues.push_back(
                    fmt("nodes[%zu].priority: must be in [0,1], got %g", k, node.priority));
            }
            const double speed = speed_of(node.velocity);
            if (speed < w.speed_min - 1e-9 || speed > w.speed_max + 1e-9) {
                issues.push_back(fmt("nodes[%zu]: speed %g outside bounds %g..%g", k, speed,
                                     w.speed_min, w.speed_max));
            }
        }
    }

    if (!config.sessions.empty() && config.session_gen) {
        issues.push_back("sessions: explicit list and generator form are mutually exclusive");
    }
    check_session_endpoints(config.sessions, n, issues);
    return issues;
}

std::vector<NodeState> materialize_nodes(const ScenarioConfig& config) {
    if (!config.explicit_nodes.empty()) {
        auto nodes = config.explicit_nodes;
        std::sort(nodes.begin(), nodes.end(),
                  [](const NodeState& a, const NodeState& b) { return a.id < b.id; });
        return nodes;
    }

    RandomStream placement(config.seed, RandomStream::Purpose::NodePlacement);
    RandomStream priorities(config.seed, RandomStream::Purpose::Priority);

    std::vector<NodeState> nodes;
    nodes.reserve(config.node_count);
    for (std::uint32_t id = 0; id < config.node_count; ++id) {
        NodeState node;
        node.id = id;
        node.position.x = placement.next_in(0.0, config.world.width);
        node.position.y = placement.next_in(0.0, config.world.height);
        const double heading = placement.next_in(0.0, 2.0 * std::numbers::pi_v<double>);
        const double speed = placement.next_in(config.world.speed_min, config.world.speed_max);
        node.velocity = {speed * std::cos(heading), speed * std::sin(heading)};
        node.priority = priorities.next_unit();
        nodes.push_back(node);
    }
    return nodes;
}

std::vector<SessionSpec> materialize_sessions(const ScenarioConfig& config) {
    if (!config.session_gen) return config.sessions;

    const std::uint32_t n = config.effective_node_count();
    RandomStream traffic(config.seed, RandomStream::Purpose::Traffic);

    std::vector<SessionSpec> specs;
    specs.reserve(config.session_gen->count);
    for (std::uint32_t k = 0; k < config.session_gen->count; ++k) {
        SessionSpec spec;
        spec.source = static_cast<NodeId>(traffic.next_below(n));
        spec.destination = static_cast<NodeId>(traffic.next_below(n - 1));
        if (spec.destination >= spec.source) spec.destination += 1;
        spec.start_slot = static_cast<std::int64_t>(
            traffic.next_below(static_cast<std::uint64_t>(config.session_gen->start_window) + 1));
        specs.push_back(spec);
    }
    return specs;
}

std::optional<std::uint32_t> bfs_hop_distance(const TopologySnapshot& topo, NodeId s, NodeId d) {
    (void)topo.node(s);
    (void)topo.node(d);
    if (s == d) return 0;

    std::map<NodeId, std::uint32_t> dist;
    dist[s] = 0;
    std::deque<NodeId> frontier{s};
    while (!frontier.empty()) {
        const NodeId at = frontier.front();
        frontier.pop_front();
        for (NodeId n : neighbors_of(topo, at)) {
            if (dist.count(n)) continue;
            dist[n] = dist[at] + 1;
            if (n == d) return dist[n];
            frontier.push_back(n);
        }
    }
    return std::nullopt;
}

Metrics collect_metrics(const std::vector<SlotLog>& logs,
                        const std::vector<SessionSummary>& sessions) {
    Metrics m;
    m.sessions_total = sessions.size();
    for (const auto& s : sessions) {
        switch (s.status.state) {
            case SessionState::Delivered:
                m.delivered += 1;
                m.hop_counts.push_back(s.hop_count);
                break;
            case SessionState::Failed:
                m.failed += 1;
                break;
            case SessionState::InProgress:
                m.in_flight_at_end += 1;
                break;
        }
    }
    for (const auto& log : logs) {
        m.total_transmissions += log.transfers.size() + log.flood_broadcasts.size();
        m.total_collisions_detected += log.resolutions.size() + log.flood_collisions.size();
        for (const auto& r : log.resolutions) m.total_deferrals += r.deferred.size();
        m.total_recoveries += log.recoveries.size();
    }
    m.delivery_ratio =
        m.sessions_total == 0 ? 0.0 : static_cast<double>(m.delivered) / m.sessions_total;
    return m;
}

namespace {

struct RuntimeSession {
    SessionSpec spec;
    Session session;
    bool injected = false;
    bool deferred_last_slot = false;
    std::optional<std::uint32_t> end_slot;
};

TopologySnapshot initial_snapshot(const ScenarioConfig& config,
                                  const std::vector<NodeState>& nodes) {
    TopologySnapshot topo;
    topo.slot = 0;
    topo.nodes = nodes;
    topo.range = config.world.range;
    topo.width = config.world.width;
    topo.height = config.world.height;
    return topo;
}

std::vector<RuntimeSession> make_runtime_sessions(const std::vector<SessionSpec>& specs) {
    std::vector<RuntimeSession> runtime;
    runtime.reserve(specs.size());
    for (std::size_t k = 0; k < specs.size(); ++k) {
        RuntimeSession rs;
        rs.spec = specs[k];
        rs.session =
            Session::start(static_cast<SessionId>(k), specs[k].source, specs[k].destination);
        runtime.push_back(std::move(rs));
    }
    return runtime;
}

void require_valid(const ScenarioConfig& config) {
    auto issues = validate_scenario(config);
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::vector<SessionSummary> summarize(const std::vector<RuntimeSession>& runtime) {
    std::vector<SessionSummary> out;
    out.reserve(runtime.size());
    for (const auto& rs : runtime) {
        SessionSummary s;
        s.id = rs.session.id;
        s.source = rs.session.source;
        s.destination = rs.session.destination;
        s.start_slot = rs.spec.start_slot;
        s.status = rs.session.status;
        s.hop_count = rs.session.hop_count;
        s.end_slot = rs.end_slot;
        out.push_back(s);
    }
    return out;
}

void finish_session(RuntimeSession& rs, SlotLog& log, std::uint32_t slot) {
    log.status_changes.push_back({rs.session.id, rs.session.status});
    rs.end_slot = slot;
}

/// Applies one executed transfer to its session: success moves custody and
/// may deliver; failure is terminal.
void apply_transfer(const TopologySnapshot& topo, RuntimeSession& rs,
                    const TransferOutcome& outcome, SlotLog& log, std::uint32_t slot) {
    if (outcome.success) {
        commit_transfer(topo, rs.session);
        if (!rs.session.status.in_flight()) finish_session(rs, log, slot);
    } else {
        rs.session.candidate.reset();
        rs.session.status = SessionStatus::failed(FailureReason::TransferError);
        finish_session(rs, log, slot);
    }
}

}  // namespace

Report run_scenario(const ScenarioConfig& config) {
    require_valid(config);

    const auto nodes = materialize_nodes(config);
    auto specs = materialize_sessions(config);
    {
        std::vector<std::string> issues;
        check_session_endpoints(specs, static_cast<std::uint32_t>(nodes.size()), issues);
        if (!issues.empty()) throw ValidationError(std::move(issues));
    }

    TopologySnapshot topo = initial_snapshot(config, nodes);
    auto runtime = make_runtime_sessions(specs);
    RandomStream link_rng(config.seed, RandomStream::Purpose::LinkLoss);

    std::vector<SlotLog> logs;
    std::size_t pending_injections = 0;
    {
        SlotLog log0;
        log0.slot = 0;
        for (auto& rs : runtime) {
            if (rs.spec.start_slot <= 0) {
                rs.injected = true;
                log0.injections.push_back(rs.session.id);
            } else {
                pending_injections += 1;
            }
        }
        logs.push_back(std::move(log0));
    }

    for (std::uint32_t t = 1; t <= config.max_slots; ++t) {
        bool any_work = pending_injections > 0;
        for (const auto& rs : runtime) {
            if (rs.injected && rs.session.status.in_flight()) {
                any_work = true;
                break;
            }
        }
        if (!any_work) break;

        topo = step_mobility(topo);
        SlotLog log;
        log.slot = t;

        // Phase A: every in-flight session settles on a candidate (running
        // recovery as needed) and emits its intent — deferred sessions first.
        std::vector<bool> was_deferred(runtime.size());
        for (std::size_t k = 0; k < runtime.size(); ++k) {
            was_deferred[k] = runtime[k].deferred_last_slot;
            runtime[k].deferred_last_slot = false;
        }
        for (const bool deferred_pass : {true, false}) {
            for (std::size_t k = 0; k < runtime.size(); ++k) {
                auto& rs = runtime[k];
                if (!rs.injected || !rs.session.status.in_flight()) continue;
                if (was_deferred[k] != deferred_pass) continue;
                auto prep = prepare_intent(topo, rs.session, config.protocol);
                log.recoveries.insert(log.recoveries.end(), prep.recoveries.begin(),
                                      prep.recoveries.end());
                if (!rs.session.status.in_flight()) finish_session(rs, log, t);
                if (prep.intent) log.intents.push_back(*prep.intent);
            }
        }

        // Phase B: per-receiver contention, ascending receiver id.
        std::map<NodeId, std::vector<TransmitIntent>> groups;
        for (const auto& intent : log.intents) groups[intent.receiver].push_back(intent);

        for (auto& [receiver, group] : groups) {
            if (group.size() >= 2) {
                auto res = resolve_contention(topo, group, config.protocol, link_rng);
                // Two sessions parked on one holder can both claim the winning
                // sender; the earliest intent in pool order gets the radio and
                // the other simply retries next slot.
                SessionId winner_session = 0;
                for (const auto& intent : group) {
                    if (intent.sender == res.winner) {
                        winner_session = intent.session_id;
                        break;
                    }
                }
                log.transfers.push_back(
                    {winner_session, res.winner, receiver, res.winner_outcome, true});
                apply_transfer(topo, runtime[winner_session], res.winner_outcome, log, t);
                for (const auto& d : res.deferred) {
                    runtime[d.session_id].deferred_last_slot = true;
                }
                log.resolutions.push_back(std::move(res));
            } else {
                const auto& intent = group.front();
                const auto outcome =
                    attempt_transfer(topo, intent.sender, intent.receiver, config.protocol,
                                     link_rng);
                log.transfers.push_back(
                    {intent.session_id, intent.sender, intent.receiver, outcome, false});
                apply_transfer(topo, runtime[intent.session_id], outcome, log, t);
            }
        }

        // Phase C: inject sessions whose start slot arrived; they first act
        // next slot, against the next snapshot.
        for (auto& rs : runtime) {
            if (!rs.injected && rs.spec.start_slot == static_cast<std::int64_t>(t)) {
                rs.injected = true;
                pending_injections -= 1;
                log.injections.push_back(rs.session.id);
            }
        }

        logs.push_back(std::move(log));
    }

    Report report;
    report.scenario = config;
    report.sessions = summarize(runtime);
    report.metrics = collect_metrics(logs, report.sessions);
    report.slots = std::move(logs);
    return report;
}

namespace {

/// Per-session flood state for the baseline.
struct FloodSession {
    SessionSpec spec;
    SessionId id = 0;
    bool injected = false;
    bool delivered = false;
    std::vector<char> received;
    std::vector<std::uint32_t> depth;     // hops from source at first receipt
    std::vector<NodeId> pending;          // received but not yet rebroadcast
    std::optional<std::uint32_t> end_slot;

    bool quiescent() const { return pending.empty(); }
};

}  // namespace

Report run_flooding_baseline(const ScenarioConfig& config) {
    require_valid(config);

    const auto nodes = materialize_nodes(config);
    auto specs = materialize_sessions(config);
    {
        std::vector<std::string> issues;
        check_session_endpoints(specs, static_cast<std::uint32_t>(nodes.size()), issues);
        if (!issues.empty()) throw ValidationError(std::move(issues));
    }

    TopologySnapshot topo = initial_snapshot(config, nodes);
    const std::size_t n = nodes.size();

    std::vector<FloodSession> floods;
    floods.reserve(specs.size());
    for (std::size_t k = 0; k < specs.size(); ++k) {
        FloodSession f;
        f.spec = specs[k];
        f.id = static_cast<SessionId>(k);
        f.received.assign(n, 0);
        f.depth.assign(n, 0);
        floods.push_back(std::move(f));
    }

    const auto inject = [](FloodSession& f) {
        f.injected = true;
        f.received[f.spec.source] = 1;
        f.pending.assign(1, f.spec.source);
    };

    std::vector<SlotLog> logs;
    std::size_t pending_injections = 0;
    {
        SlotLog log0;
        log0.slot = 0;
        for (auto& f : floods) {
            if (f.spec.start_slot <= 0) {
                inject(f);
                log0.injections.push_back(f.id);
            } else {
                pending_injections += 1;
            }
        }
        logs.push_back(std::move(log0));
    }

    for (std::uint32_t t = 1; t <= config.max_slots; ++t) {
        bool any_work = pending_injections > 0;
        for (const auto& f : floods) {
            if (f.injected && !f.quiescent()) {
                any_work = true;
                break;
            }
        }
        if (!any_work) break;

        topo = step_mobility(topo);
        SlotLog log;
        log.slot = t;

        for (auto& f : floods) {
            if (!f.injected || f.quiescent()) continue;

            // Everyone holding an unbroadcast copy transmits once, together.
            std::map<NodeId, std::vector<NodeId>> heard_from;  // receiver -> broadcasters
            for (NodeId b : f.pending) {
                log.flood_broadcasts.push_back({f.id, b});
                for (NodeId r : neighbors_of(topo, b)) heard_from[r].push_back(b);
            }
            f.pending.clear();

            for (const auto& [receiver, broadcasters] : heard_from) {
                if (broadcasters.size() >= 2) log.flood_collisions.push_back({f.id, receiver});
                if (f.received[receiver]) continue;
                f.received[receiver] = 1;
                std::uint32_t best = f.depth[broadcasters.front()];
                for (NodeId b : broadcasters) best = std::min(best, f.depth[b]);
                f.depth[receiver] = best + 1;
                f.pending.push_back(receiver);
                if (receiver == f.spec.destination && !f.delivered) {
                    f.delivered = true;
                    f.end_slot = t;
                    log.status_changes.push_back({f.id, SessionStatus::delivered()});
                }
            }
            // heard_from is id-ordered, so pending stays ascending.

            if (f.quiescent() && !f.delivered && !f.end_slot) {
                // Flood died out without reaching the destination.
                f.end_slot = t;
                log.status_changes.push_back(
                    {f.id, SessionStatus::failed(FailureReason::NoRoute)});
            }
        }

        for (auto& f : floods) {
            if (!f.injected && f.spec.start_slot == static_cast<std::int64_t>(t)) {
                inject(f);
                pending_injections -= 1;
                log.injections.push_back(f.id);
            }
        }

        logs.push_back(std::move(log));
    }

    Report report;
    report.scenario = config;
    report.sessions.reserve(floods.size());
    for (const auto& f : floods) {
        SessionSummary s;
        s.id = f.id;
        s.source = f.spec.source;
        s.destination = f.spec.destination;
        s.start_slot = f.spec.start_slot;
        if (f.delivered) {
            s.status = SessionStatus::delivered();
            s.hop_count = f.depth[f.spec.destination];
        } else if (f.injected && f.quiescent()) {
            s.status = SessionStatus::failed(FailureReason::NoRoute);
        } else {
            s.status = SessionStatus::in_progress();
        }
        s.end_slot = f.end_slot;
        report.sessions.push_back(s);
    }
    report.metrics = collect_metrics(logs, report.sessions);
    report.slots = std::move(logs);
    return report;
}

}  // namespace meshsim
