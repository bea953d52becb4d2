#include "meshsim/protocol.hpp"

#include <algorithm>
#include <cassert>

#include "meshsim/errors.hpp"
#include "meshsim/geometry.hpp"

namespace meshsim {

std::optional<NodeId> select_next_hop(const TopologySnapshot& topo, const Session& session,
                                      NodeId at, std::optional<NodeId> excluded) {
    const Position goal = topo.node(session.destination).position;

    std::optional<NodeId> best;
    double best_dist = 0.0;
    for (NodeId n : neighbors_of(topo, at)) {
        if (session.visited.count(n) > 0) continue;
        if (excluded && n == *excluded) continue;
        const double d = distance(topo.node(n).position, goal);
        if (!best || d < best_dist || (d == best_dist && n < *best)) {
            best = n;
            best_dist = d;
        }
    }
    return best;
}

std::optional<NodeId> pop_parent(Session& session) {
    if (session.parent_stack.empty()) return std::nullopt;
    const NodeId parent = session.parent_stack.back();
    session.parent_stack.pop_back();
    session.holder = parent;
    return parent;
}

RecoveryRecord recover_route(const TopologySnapshot& topo, Session& session,
                             std::optional<NodeId> stale_candidate, const ProtocolConfig& cfg) {
    RecoveryRecord rec;
    rec.session_id = session.id;
    rec.holder_before = session.holder;
    rec.holder_after = session.holder;

    // Refuse outright once the budget is spent; the counter never passes the limit.
    if (session.recovery_counter >= cfg.recovery_limit) {
        rec.exhausted = true;
        return rec;
    }
    session.recovery_counter += 1;

    auto candidate = select_next_hop(topo, session, session.holder, stale_candidate);
    if (!candidate && pop_parent(session)) {
        candidate = select_next_hop(topo, session, session.holder, stale_candidate);
    }

    session.candidate = candidate;
    rec.holder_after = session.holder;
    rec.candidate = candidate;
    return rec;
}

bool has_competing_sender(const std::vector<TransmitIntent>& intents, NodeId sender,
                          NodeId receiver) {
    for (const auto& intent : intents) {
        if (intent.receiver == receiver && intent.sender != sender) return true;
    }
    return false;
}

NodeId highest_priority_sender(const TopologySnapshot& topo,
                               const std::vector<TransmitIntent>& group) {
    if (group.empty()) throw EmptyContentionError();

    NodeId best = group.front().sender;
    double best_priority = topo.node(best).priority;
    for (std::size_t k = 1; k < group.size(); ++k) {
        const NodeId sender = group[k].sender;
        const double p = topo.node(sender).priority;
        if (p > best_priority || (p == best_priority && sender < best)) {
            best = sender;
            best_priority = p;
        }
    }
    return best;
}

ResolutionOutcome resolve_contention(const TopologySnapshot& topo,
                                     const std::vector<TransmitIntent>& group,
                                     const ProtocolConfig& cfg, RandomStream& link_rng) {
    ResolutionOutcome out;
    out.winner = highest_priority_sender(topo, group);
    out.receiver = group.front().receiver;

    for (const auto& intent : group) {
        assert(intent.receiver == out.receiver);
        if (intent.sender != out.winner) out.deferred.push_back(intent);
    }
    std::sort(out.deferred.begin(), out.deferred.end(),
              [](const TransmitIntent& a, const TransmitIntent& b) { return a.sender < b.sender; });

    out.winner_outcome = attempt_transfer(topo, out.winner, out.receiver, cfg, link_rng);
    out.resolved = out.winner_outcome.success;
    return out;
}

TransferOutcome attempt_transfer(const TopologySnapshot& topo, NodeId sender, NodeId receiver,
                                 const ProtocolConfig& cfg, RandomStream& link_rng) {
    if (!connected(topo, sender, receiver)) {
        return TransferOutcome::fail(TransferFailure::OutOfRange);
    }
    // The draw is consumed only for transfers that actually go on the air.
    if (link_rng.next_unit() < cfg.link_loss_probability) {
        return TransferOutcome::fail(TransferFailure::LinkLoss);
    }
    return TransferOutcome::ok();
}

PrepareResult prepare_intent(const TopologySnapshot& topo, Session& session,
                             const ProtocolConfig& cfg) {
    PrepareResult out;
    assert(session.status.in_flight());

    if (!session.candidate) {
        session.candidate = select_next_hop(topo, session, session.holder);
        if (!session.candidate) {
            const auto rec = recover_route(topo, session, std::nullopt, cfg);
            out.recoveries.push_back(rec);
            if (rec.exhausted) {
                session.status = SessionStatus::failed(FailureReason::NoRoute);
                return out;
            }
        }
    } else if (!connected(topo, session.holder, *session.candidate)) {
        // Carried-over candidate drifted out of range since it was chosen.
        const NodeId stale = *session.candidate;
        session.candidate.reset();
        const auto rec = recover_route(topo, session, stale, cfg);
        out.recoveries.push_back(rec);
        if (rec.exhausted) {
            session.status = SessionStatus::failed(FailureReason::NoRoute);
            return out;
        }
    }

    // A fruitless but unexhausted recovery leaves the session in flight; it
    // tries again on the next snapshot.
    if (session.candidate) {
        out.intent = TransmitIntent{session.holder, *session.candidate, session.id};
    }
    return out;
}

void commit_transfer(const TopologySnapshot& topo, Session& session) {
    assert(session.candidate);
    const NodeId target = *session.candidate;

    session.parent_stack.push_back(session.holder);
    const bool fresh = session.visited.insert(target).second;
    assert(fresh && "forward transfer revisited a node");
    (void)fresh;
    session.holder = target;
    session.hop_count += 1;
    session.recovery_counter = 0;
    session.candidate.reset();

    if (target == session.destination) {
        session.status = SessionStatus::delivered();
        return;
    }
    // Pick the next hop on the same snapshot; the handoff happens next slot,
    // after mobility, so this choice can go stale and trigger recovery.
    session.candidate = select_next_hop(topo, session, session.holder);
}

}  // namespace meshsim
