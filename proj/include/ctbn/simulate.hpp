#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "ctbn/model.hpp"

namespace ctbn {

struct Jump {
    double t = 0.0;
    NodeId node = 0;
    friend bool operator==(const Jump&, const Jump&) = default;
};

/// Piecewise-constant path on [0, T]: an initial configuration plus timed
/// single-node flips at strictly increasing times in (0, T).
struct Trajectory {
    int d = 0;
    double T = 0.0;
    StateMask initial = 0;
    std::vector<Jump> jumps;

    /// Throws InvalidInput unless times are strictly increasing inside (0, T)
    /// and nodes are in range.
    void validate() const;
    StateMask final_state() const;
    /// State just before time t (left limit); t in (0, T].
    StateMask state_before(double t) const;
    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Initial distribution: the stationary law (exact for d <= 14, else a
/// discarded burn-in of length kBurnIn from the all-zero state), or a
/// fixed configuration.
struct Stationary {};
using StartSpec = std::variant<Stationary, StateMask>;

inline constexpr double kBurnIn = 10.0;

/// Gillespie simulation on [0, T]. Events at exactly T are dropped.
Trajectory sample_path(const CtbnModel& model, const StartSpec& start, double T, std::uint64_t seed);

/// n_reps paths with sub-seeds derive_seed(seed, i); output ordered by i.
std::vector<Trajectory> replicate(const CtbnModel& model, const StartSpec& start, double T, int n_reps,
                                  std::uint64_t seed, int threads = 1);

} // namespace ctbn
