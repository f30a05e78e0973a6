#pragma once

// Sufficient statistics of a fully observed path under the full-parent
// model pa(w) = -w.

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "ctbn/model.hpp"
#include "ctbn/simulate.hpp"

namespace ctbn {

struct NodeStats {
    /// counts[s][c] = n_w(c; s, 1-s): flips of w out of s while -w was c.
    std::array<std::map<RestrictedMask, std::int64_t>, 2> counts;
    /// times[s][c] = t_w(c; s): time w spent in s while -w was c.
    std::array<std::map<RestrictedMask, double>, 2> times;

    friend bool operator==(const NodeStats&, const NodeStats&) = default;
};

struct SuffStats {
    int d = 0;
    double T = 0.0;
    std::vector<NodeStats> nodes;

    const NodeStats& node(NodeId w) const { return nodes.at(static_cast<std::size_t>(w)); }
    std::int64_t count(NodeId w, Transition tr, RestrictedMask c) const;
    double time(NodeId w, int s, RestrictedMask c) const;
    friend bool operator==(const SuffStats&, const SuffStats&) = default;
};

/// Sparse extraction; only visited keys are stored. Validates the path.
SuffStats extract(const Trajectory& traj);

/// Total number of jumps summed over nodes, transitions and keys.
std::int64_t total_jumps(const SuffStats& stats);

} // namespace ctbn
