#pragma once

// Binary continuous-time Bayesian networks: graphs, conditional intensity
// tables, the log-linear coefficient parameterization and the two benchmark
// generators.

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace ctbn {

using NodeId = int;

/// Full configurations are packed as bitmasks, bit w = state of node w.
using StateMask = std::uint64_t;

/// Restricted configurations c over -w, bit k = state of the k-th node of -w
/// in ascending node order.
using RestrictedMask = std::uint64_t;

inline constexpr int kMaxNodes = 64;

/// Transition of a binary node, identified by its source state.
enum class Transition : int { Up = 0, Down = 1 };

inline constexpr int source_state(Transition tr) noexcept { return static_cast<int>(tr); }
inline constexpr int target_state(Transition tr) noexcept { return 1 - static_cast<int>(tr); }
inline constexpr Transition leaving(int s) noexcept { return s == 0 ? Transition::Up : Transition::Down; }

/// Full (length d) or restricted (length d-1) binary configuration.
struct Config {
    std::vector<std::uint8_t> bits;
    /// Node excluded from a restricted configuration; empty for full ones.
    std::optional<NodeId> excluded;

    static Config full(std::vector<std::uint8_t> bits) { return {std::move(bits), std::nullopt}; }
    static Config restricted(NodeId w, std::vector<std::uint8_t> bits) { return {std::move(bits), w}; }

    std::size_t size() const noexcept { return bits.size(); }
    friend bool operator==(const Config&, const Config&) = default;
};

StateMask pack(const Config& full_config);
Config unpack(StateMask state, int d);

inline constexpr int get_bit(std::uint64_t mask, int i) noexcept { return static_cast<int>((mask >> i) & 1U); }

/// Drops bit w from a full state, shifting higher bits down.
inline constexpr RestrictedMask restrict_to(StateMask state, NodeId w) noexcept {
    const std::uint64_t low = w == 0 ? 0 : (state & ((std::uint64_t{1} << w) - 1));
    const std::uint64_t high = w >= 63 ? 0 : ((state >> (w + 1)) << w);
    return low | high;
}

/// Inverse of restrict_to: re-inserts node w with state s_w.
inline constexpr StateMask expand(RestrictedMask c, NodeId w, int s_w) noexcept {
    const std::uint64_t low = w == 0 ? 0 : (c & ((std::uint64_t{1} << w) - 1));
    const std::uint64_t high = w >= 63 ? 0 : ((c >> w) << (w + 1));
    return low | high | (static_cast<std::uint64_t>(s_w & 1) << w);
}

/// Position of node u inside the -w ordering.
inline constexpr int position_in_rest(NodeId u, NodeId w) noexcept { return u < w ? u : u - 1; }
inline constexpr NodeId node_at_rest(int k, NodeId w) noexcept { return k < w ? k : k + 1; }

/// Covariate vector Z_w(c): leading intercept 1 followed by the states of
/// -w in ascending node order. Throws InvalidConfig on a shape mismatch.
std::vector<std::uint8_t> dummy_encode(NodeId w, const Config& c, int d);

/// Per-node leaving intensities. rates[idx][s] = Q_w(c; s, 1-s) where idx
/// indexes the parent configuration c big-endian over the ascending parent
/// list (first parent is the most significant bit).
struct NodeCim {
    std::vector<std::array<double, 2>> rates;
};

/// Rows of the (2d) x d coefficient matrix: row (w, s) holds the intercept
/// and the d-1 coefficients over -w for the transition s -> 1-s.
class BetaMatrix {
public:
    struct Row {
        double intercept = 0.0;
        std::vector<double> coef;
    };

    BetaMatrix() = default;
    explicit BetaMatrix(int d);

    int d() const noexcept { return d_; }
    Row& row(NodeId w, Transition tr) { return rows_.at(2 * static_cast<std::size_t>(w) + source_state(tr)); }
    const Row& row(NodeId w, Transition tr) const { return rows_.at(2 * static_cast<std::size_t>(w) + source_state(tr)); }

    /// beta^w_{s,s'}(u), u != w.
    double at(NodeId w, Transition tr, NodeId u) const;
    void set(NodeId w, Transition tr, NodeId u, double value);

    /// Natural-log intensity for restricted configuration c.
    double log_rate(NodeId w, Transition tr, RestrictedMask c) const;

    bool all_finite() const;

private:
    int d_ = 0;
    std::vector<Row> rows_;
};

/// Directed edges (u, w) meaning u -> w.
using Edge = std::pair<NodeId, NodeId>;
using EdgeSet = std::set<Edge>;

/// Edge rule: u -> w iff beta^w_{0,1}(u) != 0 or beta^w_{1,0}(u) != 0.
EdgeSet edges_from_beta(const BetaMatrix& beta);

class CtbnModel {
public:
    CtbnModel(int d, std::vector<std::vector<NodeId>> parents, std::vector<NodeCim> cims,
              std::optional<BetaMatrix> beta = std::nullopt, std::optional<std::uint64_t> seed = std::nullopt);

    int d() const noexcept { return d_; }
    const std::vector<NodeId>& parents(NodeId w) const { return parents_.at(static_cast<std::size_t>(w)); }
    const std::vector<std::vector<NodeId>>& parent_lists() const noexcept { return parents_; }
    const NodeCim& cim(NodeId w) const { return cims_.at(static_cast<std::size_t>(w)); }
    const std::vector<NodeCim>& cims() const noexcept { return cims_; }
    const std::optional<BetaMatrix>& beta() const noexcept { return beta_; }
    const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }

    /// Index into cim(w).rates for the parent states found in `state`.
    std::size_t parent_index(NodeId w, StateMask state) const;

    /// Intensity of flipping node w out of its current state in `state`.
    double rate(StateMask state, NodeId w) const;
    double rate(const Config& s, NodeId w) const;

    /// Q_w(c; s, 1-s) for a restricted configuration over -w.
    double rate_restricted(NodeId w, Transition tr, RestrictedMask c) const;

    /// True edges u -> w read off the parent lists.
    EdgeSet edges() const;

private:
    int d_;
    std::vector<std::vector<NodeId>> parents_;
    std::vector<NodeCim> cims_;
    std::optional<BetaMatrix> beta_;
    std::optional<std::uint64_t> seed_;
};

/// Chain benchmark: node 0 parentless with both leaving rates 5, node k has
/// parent k-1 and a random preference a_k; leaving rate is 1 when
/// s = |c - a_k| and 9 otherwise. Carries the exact log-linear beta.
CtbnModel make_m1(int d, std::uint64_t seed);

/// Dense-subgraph benchmark: nodes 0..4 each draw two parents among the
/// other four, remaining nodes are independent with rate 5.
CtbnModel make_m2(int d, std::uint64_t seed);

} // namespace ctbn
