#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

using namespace ctbn;

namespace {

int state_of(StateMask s, int node) { return static_cast<int>((s >> node) & 1U); }

// Restricted index built by walking the nodes explicitly.
std::uint64_t rest_index(StateMask s, int w, int d) {
    std::uint64_t c = 0;
    int pos = 0;
    for (int u = 0; u < d; ++u) {
        if (u == w) continue;
        if (state_of(s, u)) c |= std::uint64_t{1} << pos;
        ++pos;
    }
    return c;
}

} // namespace

SuffStats dense_extract(const Trajectory& traj) {
    const int d = traj.d;
    const std::size_t width = std::size_t{1} << (d - 1);
    // [w][s][c]
    std::vector<std::vector<std::vector<double>>> times(d, std::vector<std::vector<double>>(2, std::vector<double>(width, 0.0)));
    std::vector<std::vector<std::vector<std::int64_t>>> counts(
        d, std::vector<std::vector<std::int64_t>>(2, std::vector<std::int64_t>(width, 0)));
    std::vector<std::vector<std::vector<char>>> seen(d, std::vector<std::vector<char>>(2, std::vector<char>(width, 0)));

    StateMask s = traj.initial;
    double last = 0.0;
    for (std::size_t k = 0; k <= traj.jumps.size(); ++k) {
        const double end = k < traj.jumps.size() ? traj.jumps[k].t : traj.T;
        for (int w = 0; w < d; ++w) {
            const auto c = rest_index(s, w, d);
            times[w][state_of(s, w)][c] += end - last;
            seen[w][state_of(s, w)][c] = 1;
        }
        if (k == traj.jumps.size()) break;
        const int u = traj.jumps[k].node;
        ++counts[u][state_of(s, u)][rest_index(s, u, d)];
        s ^= StateMask{1} << u;
        last = end;
    }

    SuffStats out;
    out.d = d;
    out.T = traj.T;
    out.nodes.resize(d);
    for (int w = 0; w < d; ++w) {
        for (int st = 0; st < 2; ++st) {
            for (std::size_t c = 0; c < width; ++c) {
                if (seen[w][st][c]) out.nodes[w].times[st][c] = times[w][st][c];
                if (counts[w][st][c] > 0) out.nodes[w].counts[st][c] = counts[w][st][c];
            }
        }
    }
    return out;
}

TripleProblem random_problem(SplitMix64& rng, int d, int rows, bool allow_zero_counts) {
    TripleProblem p;
    p.d = d;
    p.T = 0.5 + 4.5 * rng.uniform();
    p.Z = Eigen::MatrixXd::Zero(rows, d);
    p.n = Eigen::VectorXd::Zero(rows);
    p.t = Eigen::VectorXd::Zero(rows);
    for (int r = 0; r < rows; ++r) {
        p.Z(r, 0) = 1.0;
        for (int j = 1; j < d; ++j) p.Z(r, j) = rng.coin() ? 1.0 : 0.0;
        p.n[r] = static_cast<double>(rng.below(allow_zero_counts ? 6 : 5) + (allow_zero_counts ? 0 : 1));
        p.t[r] = 0.05 + 2.0 * rng.uniform();
        p.keys.push_back(static_cast<RestrictedMask>(r));
    }
    return p;
}

double loss(const TripleProblem& p, const Eigen::VectorXd& theta) {
    double total = 0.0;
    for (Eigen::Index r = 0; r < p.Z.rows(); ++r) {
        double eta = 0.0;
        for (Eigen::Index j = 0; j < p.Z.cols(); ++j) eta += p.Z(r, j) * theta[j];
        total += -p.n[r] * eta + p.t[r] * std::exp(eta);
    }
    return total / p.T;
}

Eigen::VectorXd central_diff_grad(const TripleProblem& p, const Eigen::VectorXd& theta, double h) {
    Eigen::VectorXd g(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        Eigen::VectorXd a = theta, b = theta;
        a[j] += h;
        b[j] -= h;
        g[j] = (oracle::loss(p, a) - oracle::loss(p, b)) / (2.0 * h);
    }
    return g;
}

Eigen::VectorXd plain_grad(const TripleProblem& p, const Eigen::VectorXd& theta) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
    for (Eigen::Index r = 0; r < p.Z.rows(); ++r) {
        double eta = 0.0;
        for (Eigen::Index j = 0; j < p.Z.cols(); ++j) eta += p.Z(r, j) * theta[j];
        const double res = -p.n[r] + p.t[r] * std::exp(eta);
        for (Eigen::Index j = 0; j < p.Z.cols(); ++j) g[j] += res * p.Z(r, j);
    }
    return g / p.T;
}

namespace {

double l1(const Eigen::VectorXd& theta) {
    double s = 0.0;
    for (Eigen::Index j = 1; j < theta.size(); ++j) s += std::abs(theta[j]);
    return s;
}

} // namespace

IstaResult ista(const TripleProblem& p, double lambda, long iterations) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p.d);
    theta[0] = std::log(std::max(p.n.sum(), 1e-3) / p.t.sum());
    double L = 1.0;
    double f = oracle::loss(p, theta);
    for (long it = 0; it < iterations; ++it) {
        const Eigen::VectorXd g = plain_grad(p, theta);
        Eigen::VectorXd next(theta.size());
        double fn = 0.0;
        for (;;) {
            next[0] = theta[0] - g[0] / L;
            for (Eigen::Index j = 1; j < theta.size(); ++j) {
                const double v = theta[j] - g[j] / L;
                const double k = lambda / L;
                next[j] = v > k ? v - k : (v < -k ? v + k : 0.0);
            }
            fn = oracle::loss(p, next);
            const Eigen::VectorXd diff = next - theta;
            if (std::isfinite(fn) && fn <= f + g.dot(diff) + 0.5 * L * diff.squaredNorm()) break;
            L *= 2.0;
        }
        if (fn + lambda * l1(next) >= f + lambda * l1(theta) && it > 0) {
            // Stalled at machine precision.
            if ((next - theta).lpNorm<Eigen::Infinity>() < 1e-15) break;
        }
        theta = next;
        f = fn;
        L = std::max(1.0, L / 1.5);
    }
    return {theta, f + lambda * l1(theta)};
}

double joint_scaled_nll(const Trajectory& traj, const BetaMatrix& beta) {
    const int d = traj.d;
    auto log_rate = [&](StateMask s, int w) {
        const auto& row = beta.row(w, state_of(s, w) == 0 ? Transition::Up : Transition::Down);
        double v = row.intercept;
        int pos = 0;
        for (int u = 0; u < d; ++u) {
            if (u == w) continue;
            if (state_of(s, u)) v += row.coef[pos];
            ++pos;
        }
        return v;
    };
    StateMask s = traj.initial;
    double last = 0.0;
    double nll = 0.0;
    for (std::size_t k = 0; k <= traj.jumps.size(); ++k) {
        const double end = k < traj.jumps.size() ? traj.jumps[k].t : traj.T;
        double total = 0.0;
        for (int w = 0; w < d; ++w) total += std::exp(log_rate(s, w));
        nll += total * (end - last);
        if (k == traj.jumps.size()) break;
        nll -= log_rate(s, traj.jumps[k].node);
        s ^= StateMask{1} << traj.jumps[k].node;
        last = end;
    }
    return nll / traj.T;
}

CtbnModel independent_pair(double a, double b) {
    std::vector<NodeCim> cims(2);
    cims[0].rates = {{a, a}};
    cims[1].rates = {{b, b}};
    return CtbnModel(2, {{}, {}}, cims);
}

CtbnModel random_model(SplitMix64& rng, int d) {
    std::vector<std::vector<NodeId>> parents(d);
    std::vector<NodeCim> cims(d);
    for (int w = 0; w < d; ++w) {
        for (int u = 0; u < w; ++u) {
            if (rng.coin()) parents[w].push_back(u);
        }
        cims[w].rates.resize(std::size_t{1} << parents[w].size());
        for (auto& r : cims[w].rates) r = {0.5 + 4.5 * rng.uniform(), 0.5 + 4.5 * rng.uniform()};
    }
    return CtbnModel(d, parents, cims);
}

Trajectory random_trajectory(SplitMix64& rng, int d, double T, int max_jumps) {
    Trajectory tr;
    tr.d = d;
    tr.T = T;
    for (int i = 0; i < d; ++i) {
        if (rng.coin()) tr.initial |= StateMask{1} << i;
    }
    const int n = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_jumps) + 1));
    std::vector<double> times;
    for (int i = 0; i < n; ++i) times.push_back(T * rng.uniform());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (double t : times) {
        if (t > 0.0 && t < T) tr.jumps.push_back({t, static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(d)))});
    }
    return tr;
}

} // namespace oracle
