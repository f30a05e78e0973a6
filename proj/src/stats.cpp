#include "ctbn/stats.hpp"

namespace ctbn {

std::int64_t SuffStats::count(NodeId w, Transition tr, RestrictedMask c) const {
    const auto& m = node(w).counts[static_cast<std::size_t>(source_state(tr))];
    const auto it = m.find(c);
    return it == m.end() ? 0 : it->second;
}

double SuffStats::time(NodeId w, int s, RestrictedMask c) const {
    const auto& m = node(w).times[static_cast<std::size_t>(s)];
    const auto it = m.find(c);
    return it == m.end() ? 0.0 : it->second;
}

SuffStats extract(const Trajectory& traj) {
    traj.validate();
    SuffStats out;
    out.d = traj.d;
    out.T = traj.T;
    out.nodes.resize(static_cast<std::size_t>(traj.d));

    StateMask state = traj.initial;
    double seg_start = 0.0;
    auto close_segment = [&](double seg_end) {
        const double len = seg_end - seg_start;
        for (NodeId w = 0; w < traj.d; ++w) {
            const auto s = static_cast<std::size_t>(get_bit(state, w));
            out.nodes[static_cast<std::size_t>(w)].times[s][restrict_to(state, w)] += len;
        }
    };

    for (const auto& jump : traj.jumps) {
        close_segment(jump.t);
        const auto s = static_cast<std::size_t>(get_bit(state, jump.node));
        ++out.nodes[static_cast<std::size_t>(jump.node)].counts[s][restrict_to(state, jump.node)];
        state ^= StateMask{1} << jump.node;
        seg_start = jump.t;
    }
    close_segment(traj.T);
    return out;
}

std::int64_t total_jumps(const SuffStats& stats) {
    std::int64_t n = 0;
    for (const auto& ns : stats.nodes) {
        for (const auto& m : ns.counts) {
            for (const auto& [key, count] : m) n += count;
        }
    }
    return n;
}

} // namespace ctbn
