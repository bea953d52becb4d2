#include "meshsim/world.hpp"

#include <cassert>

#include "meshsim/errors.hpp"

namespace meshsim {

const NodeState& TopologySnapshot::node(NodeId id) const {
    if (!has_node(id)) {
        throw UnknownNodeError(id);
    }
    assert(nodes[id].id == id);
    return nodes[id];
}

bool connected(const TopologySnapshot& topo, NodeId i, NodeId j) {
    const NodeState& a = topo.node(i);
    const NodeState& b = topo.node(j);
    if (i == j) {
        throw SameNodeError(i);
    }
    return distance(a.position, b.position) <= topo.range;
}

std::vector<NodeId> neighbors_of(const TopologySnapshot& topo, NodeId i) {
    const NodeState& self = topo.node(i);
    std::vector<NodeId> out;
    for (const NodeState& other : topo.nodes) {
        if (other.id != i && distance(self.position, other.position) <= topo.range) {
            out.push_back(other.id);
        }
    }
    return out;
}

namespace {

// Mirror c back into [0, limit], flipping v once per bounce. Loops because a
// single step may overshoot a small world several times over.
void reflect_axis(double& c, double& v, double limit) {
    while (c < 0.0 || c > limit) {
        if (c < 0.0) {
            c = -c;
        } else {
            c = 2.0 * limit - c;
        }
        v = -v;
    }
}

}  // namespace

TopologySnapshot step_mobility(const TopologySnapshot& topo) {
    TopologySnapshot next = topo;
    next.slot = topo.slot + 1;
    for (NodeState& n : next.nodes) {
        n.position.x += n.velocity.vx;
        n.position.y += n.velocity.vy;
        reflect_axis(n.position.x, n.velocity.vx, next.width);
        reflect_axis(n.position.y, n.velocity.vy, next.height);
        assert(n.position.x >= 0.0 && n.position.x <= next.width);
        assert(n.position.y >= 0.0 && n.position.y <= next.height);
    }
    return next;
}

}  // namespace meshsim
