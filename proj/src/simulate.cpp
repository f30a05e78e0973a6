#include "ctbn/simulate.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ctbn/chain.hpp"
#include "ctbn/error.hpp"
#include "ctbn/parallel.hpp"
#include "ctbn/rng.hpp"

namespace ctbn {

void Trajectory::validate() const {
    if (d < 1 || d > kMaxNodes) throw Error(ErrorKind::InvalidInput, "trajectory node count out of range");
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidInput, "trajectory horizon must be positive");
    if (d < kMaxNodes && (initial >> d) != 0) throw Error(ErrorKind::InvalidInput, "initial state has bits beyond d");
    double prev = 0.0;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        const auto& j = jumps[i];
        if (j.node < 0 || j.node >= d) throw Error(ErrorKind::InvalidInput, "jump node out of range at index " + std::to_string(i));
        if (!(j.t > prev) || !(j.t < T)) {
            throw Error(ErrorKind::InvalidInput,
                        "jump times must be strictly increasing inside (0, T); violated at index " + std::to_string(i));
        }
        prev = j.t;
    }
}

StateMask Trajectory::final_state() const {
    StateMask s = initial;
    for (const auto& j : jumps) s ^= StateMask{1} << j.node;
    return s;
}

StateMask Trajectory::state_before(double t) const {
    StateMask s = initial;
    for (const auto& j : jumps) {
        if (!(j.t < t)) break;
        s ^= StateMask{1} << j.node;
    }
    return s;
}

namespace {

class Simulator {
public:
    explicit Simulator(const CtbnModel& model) : model_(model), children_(static_cast<std::size_t>(model.d())) {
        for (NodeId w = 0; w < model.d(); ++w) {
            for (NodeId u : model.parents(w)) children_[static_cast<std::size_t>(u)].push_back(w);
        }
    }

    /// Runs from `state` over [0, horizon); appends jumps when `out` is set.
    StateMask run(StateMask state, double horizon, SplitMix64& rng, std::vector<Jump>* out) const {
        const auto d = static_cast<std::size_t>(model_.d());
        std::vector<double> rates(d);
        for (NodeId w = 0; w < model_.d(); ++w) rates[static_cast<std::size_t>(w)] = model_.rate(state, w);
        double t = 0.0;
        for (;;) {
            const double total = std::accumulate(rates.begin(), rates.end(), 0.0);
            t += rng.exponential(total);
            if (!(t < horizon)) break;
            double pick = rng.uniform() * total;
            std::size_t w = 0;
            for (; w + 1 < d; ++w) {
                if (pick < rates[w]) break;
                pick -= rates[w];
            }
            state ^= StateMask{1} << w;
            if (out) out->push_back({t, static_cast<NodeId>(w)});
            rates[w] = model_.rate(state, static_cast<NodeId>(w));
            for (NodeId c : children_[w]) rates[static_cast<std::size_t>(c)] = model_.rate(state, c);
        }
        return state;
    }

private:
    const CtbnModel& model_;
    std::vector<std::vector<NodeId>> children_;
};

StateMask draw_from(const Eigen::VectorXd& pi, SplitMix64& rng) {
    double u = rng.uniform();
    for (Eigen::Index s = 0; s < pi.size(); ++s) {
        if (u < pi[s]) return static_cast<StateMask>(s);
        u -= pi[s];
    }
    return static_cast<StateMask>(pi.size() - 1);
}

Trajectory sample_with(const Simulator& sim, const CtbnModel& model, const StartSpec& start, const Eigen::VectorXd* pi,
                       double T, std::uint64_t seed) {
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidParameter, "T must be positive and finite");
    SplitMix64 rng(seed);
    Trajectory traj;
    traj.d = model.d();
    traj.T = T;
    if (const auto* fixed = std::get_if<StateMask>(&start)) {
        if (model.d() < kMaxNodes && (*fixed >> model.d()) != 0) {
            throw Error(ErrorKind::InvalidConfig, "start configuration has bits beyond d");
        }
        traj.initial = *fixed;
    } else if (pi) {
        traj.initial = draw_from(*pi, rng);
    } else {
        traj.initial = sim.run(0, kBurnIn, rng, nullptr);
    }
    sim.run(traj.initial, T, rng, &traj.jumps);
    return traj;
}

std::optional<Eigen::VectorXd> start_distribution(const CtbnModel& model, const StartSpec& start) {
    if (std::holds_alternative<Stationary>(start) && model.d() <= kMaxAmalgamatedNodes) {
        return stationary_distribution(model);
    }
    return std::nullopt;
}

} // namespace

Trajectory sample_path(const CtbnModel& model, const StartSpec& start, double T, std::uint64_t seed) {
    const Simulator sim(model);
    const auto pi = start_distribution(model, start);
    return sample_with(sim, model, start, pi ? &*pi : nullptr, T, seed);
}

std::vector<Trajectory> replicate(const CtbnModel& model, const StartSpec& start, double T, int n_reps,
                                  std::uint64_t seed, int threads) {
    if (n_reps < 1) throw Error(ErrorKind::InvalidParameter, "n_reps must be at least 1");
    const Simulator sim(model);
    const auto pi = start_distribution(model, start);
    std::vector<Trajectory> out(static_cast<std::size_t>(n_reps));
    parallel_for(out.size(), threads, [&](std::size_t i) {
        out[i] = sample_with(sim, model, start, pi ? &*pi : nullptr, T, derive_seed(seed, i));
    });
    return out;
}

} // namespace ctbn
