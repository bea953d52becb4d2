#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "meshsim/world.hpp"

namespace meshsim {

using SessionId = std::uint32_t;

enum class SessionState : std::uint8_t { InProgress, Delivered, Failed };

enum class FailureReason : std::uint8_t {
    NoRoute,        // recovery budget exhausted without a usable next hop
    TransferError,  // an executed transfer came back failed
};

enum class TransferFailure : std::uint8_t { OutOfRange, LinkLoss };

struct SessionStatus {
    SessionState state = SessionState::InProgress;
    std::optional<FailureReason> reason;  // set iff state == Failed

    static SessionStatus in_progress() { return {}; }
    static SessionStatus delivered() { return {SessionState::Delivered, std::nullopt}; }
    static SessionStatus failed(FailureReason r) { return {SessionState::Failed, r}; }

    bool in_flight() const { return state == SessionState::InProgress; }
    friend bool operator==(const SessionStatus&, const SessionStatus&) = default;
};

/// One source-to-destination relay of a single packet.
///
/// `holder` is the node currently holding the packet. `candidate` is the
/// chosen next hop; an empty optional is the "no next hop" sentinel.
/// `parent_stack` records the chain of prior holders so recovery can hand the
/// packet back when greedy forwarding dead-ends. `recovery_counter` counts
/// consecutive recovery attempts since the last successful hop.
struct Session {
    SessionId id = 0;
    NodeId source = 0;
    NodeId destination = 0;
    NodeId holder = 0;
    std::optional<NodeId> candidate;
    std::set<NodeId> visited;
    std::vector<NodeId> parent_stack;
    std::uint32_t recovery_counter = 0;
    std::uint32_t hop_count = 0;
    SessionStatus status;

    static Session start(SessionId id, NodeId source, NodeId destination) {
        Session s;
        s.id = id;
        s.source = source;
        s.destination = destination;
        s.holder = source;
        s.visited.insert(source);
        return s;
    }

    friend bool operator==(const Session&, const Session&) = default;
};

/// A declared wish to send in the current slot. Contention is per receiver:
/// two intents with the same receiver in one slot collide.
struct TransmitIntent {
    NodeId sender = 0;
    NodeId receiver = 0;
    SessionId session_id = 0;

    friend bool operator==(const TransmitIntent&, const TransmitIntent&) = default;
};

struct TransferOutcome {
    bool success = false;
    std::optional<TransferFailure> failure;  // empty iff success

    static TransferOutcome ok() { return {true, std::nullopt}; }
    static TransferOutcome fail(TransferFailure f) { return {false, f}; }
    friend bool operator==(const TransferOutcome&, const TransferOutcome&) = default;
};

/// Result of resolving one per-receiver contention group: the winner's
/// transfer has been executed, everyone else waits for the next slot.
struct ResolutionOutcome {
    NodeId receiver = 0;
    NodeId winner = 0;
    std::vector<TransmitIntent> deferred;  // losers, ascending by sender id
    bool resolved = false;                 // winner's transfer succeeded
    TransferOutcome winner_outcome;
};

struct ProtocolConfig {
    std::uint32_t recovery_limit = 2;     // consecutive recovery attempts before giving up
    double link_loss_probability = 0.0;   // in [0, 1]; 0 makes transfers purely geometric

    friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

}  // namespace meshsim
