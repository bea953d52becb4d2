#pragma once

#include <cstdint>
#include <vector>

#include "meshsim/geometry.hpp"

namespace meshsim {

using NodeId = std::uint32_t;

struct NodeState {
    NodeId id = 0;          // dense, unique within a world: 0..N-1
    Position position;
    Velocity velocity;
    double priority = 0.0;  // forwarding priority in [0, 1]

    friend bool operator==(const NodeState&, const NodeState&) = default;
};

struct WorldConfig {
    double width = 1000.0;       // meters
    double height = 1000.0;      // meters
    double range = 100.0;        // communication range R, meters
    double speed_min = 0.0;      // meters per slot
    double speed_max = 20.0;     // meters per slot
    double slot_duration = 1.0;  // seconds; metadata only, nothing derives from it

    friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

/// All node states at one slot. Immutable once produced; the unit-disk
/// adjacency (i ~ j iff distance <= range, boundary inclusive) is induced on
/// demand rather than stored. Nodes are ordered by id, with nodes[k].id == k.
struct TopologySnapshot {
    std::uint32_t slot = 0;
    std::vector<NodeState> nodes;
    double range = 0.0;
    double width = 0.0;   // world bounds, carried so mobility can reflect
    double height = 0.0;

    bool has_node(NodeId id) const { return id < nodes.size(); }
    const NodeState& node(NodeId id) const;  // throws UnknownNodeError
};

/// True iff distance(i, j) <= range. Distance exactly equal to the range
/// counts as connected. Throws UnknownNodeError / SameNodeError.
bool connected(const TopologySnapshot& topo, NodeId i, NodeId j);

/// Exactly { j != i : connected(topo, i, j) }, ascending by id.
std::vector<NodeId> neighbors_of(const TopologySnapshot& topo, NodeId i);

/// Advance every node by its velocity for one slot and bump the slot number.
/// A node crossing a boundary reflects: the position is mirrored back inside
/// and the corresponding velocity component is negated, so speed is
/// conserved. Constant-velocity model: velocities change only by reflection.
TopologySnapshot step_mobility(const TopologySnapshot& topo);

}  // namespace meshsim
