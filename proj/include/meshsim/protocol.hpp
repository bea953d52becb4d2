#pragma once

#include <optional>
#include <vector>

#include "meshsim/rng.hpp"
#include "meshsim/session.hpp"
#include "meshsim/world.hpp"

namespace meshsim {

/// Record of one recovery attempt, kept for tracing and metrics.
struct RecoveryRecord {
    SessionId session_id = 0;
    NodeId holder_before = 0;       // holder when the attempt started
    NodeId holder_after = 0;        // holder after any backtrack
    std::optional<NodeId> candidate;  // next hop found, if any
    bool exhausted = false;         // attempt refused: counter already at limit
};

/// Outcome of preparing a session's intent for the current slot.
struct PrepareResult {
    std::optional<TransmitIntent> intent;      // present when the session wants to send
    std::vector<RecoveryRecord> recoveries;    // recovery attempts made along the way
};

/// Greedy next-hop choice: among the holder's neighbors that are not yet
/// visited (and not `excluded`), pick the one closest to the destination,
/// breaking distance ties by lowest node id. Returns empty when no neighbor
/// qualifies. If the destination itself is a neighbor it wins outright.
std::optional<NodeId> select_next_hop(const TopologySnapshot& topo, const Session& session,
                                      NodeId at, std::optional<NodeId> excluded = std::nullopt);

/// Pops the most recent parent off the session's stack and hands custody
/// back to it. Returns empty (and leaves the session alone) when the stack
/// is empty, i.e. the holder is the source.
std::optional<NodeId> pop_parent(Session& session);

/// One recovery attempt for a session whose candidate went stale or was
/// never found. Self-checks the counter against the limit: when already at
/// the limit the attempt is refused (`exhausted`) and nothing changes.
/// Otherwise the counter is bumped, a fresh candidate is sought at the
/// current holder (excluding the stale one), and on failure custody moves
/// one step back up the parent chain and the search repeats there.
RecoveryRecord recover_route(const TopologySnapshot& topo, Session& session,
                             std::optional<NodeId> stale_candidate, const ProtocolConfig& cfg);

/// True when some other sender also targets `receiver` this slot — i.e.
/// `sender`'s transmission would collide.
bool has_competing_sender(const std::vector<TransmitIntent>& intents, NodeId sender,
                          NodeId receiver);

/// Among intents aimed at one receiver, the sender with the highest
/// priority; ties broken by lowest sender id. Throws EmptyContentionError
/// on an empty group.
NodeId highest_priority_sender(const TopologySnapshot& topo,
                               const std::vector<TransmitIntent>& group);

/// Resolves one contention group: picks the winner by priority, executes its
/// transfer, and defers the rest (ascending by sender id) to the next slot.
ResolutionOutcome resolve_contention(const TopologySnapshot& topo,
                                     const std::vector<TransmitIntent>& group,
                                     const ProtocolConfig& cfg, RandomStream& link_rng);

/// Executes one transfer attempt. Fails with OutOfRange when the pair is
/// disconnected on this snapshot; otherwise draws from `link_rng` and fails
/// with LinkLoss when the draw lands below `link_loss_probability`.
TransferOutcome attempt_transfer(const TopologySnapshot& topo, NodeId sender, NodeId receiver,
                                 const ProtocolConfig& cfg, RandomStream& link_rng);

/// Pre-contention half of a session's slot: make sure there is a live
/// candidate (running recovery when there isn't), then emit the transmit
/// intent. May mark the session Failed(NoRoute) when recovery is exhausted.
PrepareResult prepare_intent(const TopologySnapshot& topo, Session& session,
                             const ProtocolConfig& cfg);

/// Post-transfer bookkeeping for a successful hop: custody moves to the
/// candidate, the visited set and parent stack grow, the recovery counter
/// resets, and — unless the packet just arrived — the next candidate is
/// chosen on the same snapshot.
void commit_transfer(const TopologySnapshot& topo, Session& session);

}  // namespace meshsim
