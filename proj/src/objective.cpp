#include "ctbn/objective.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "ctbn/error.hpp"

namespace ctbn {

std::vector<TripleKey> all_triples(int d) {
    std::vector<TripleKey> out;
    out.reserve(2 * static_cast<std::size_t>(d));
    for (NodeId w = 0; w < d; ++w) {
        out.push_back({w, Transition::Up});
        out.push_back({w, Transition::Down});
    }
    return out;
}

bool is_degenerate(const SuffStats& stats, const TripleKey& key) {
    double total = 0.0;
    for (const auto& [c, secs] : stats.node(key.w).times[static_cast<std::size_t>(key.s())]) total += secs;
    return !(total > 0.0);
}

TripleProblem build_triple(const SuffStats& stats, const TripleKey& key) {
    if (key.w < 0 || key.w >= stats.d) throw Error(ErrorKind::InvalidParameter, "triple node out of range");
    const auto& ns = stats.node(key.w);
    const auto s = static_cast<std::size_t>(key.s());

    std::set<RestrictedMask> visited;
    for (const auto& [c, secs] : ns.times[s]) {
        if (secs > 0.0) visited.insert(c);
    }
    for (const auto& [c, cnt] : ns.counts[s]) {
        if (cnt > 0) visited.insert(c);
    }

    TripleProblem p;
    p.key = key;
    p.d = stats.d;
    p.T = stats.T;
    p.keys.assign(visited.begin(), visited.end());
    const auto rows = static_cast<Eigen::Index>(p.keys.size());
    p.Z = Eigen::MatrixXd::Zero(rows, stats.d);
    p.n.resize(rows);
    p.t.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const RestrictedMask c = p.keys[static_cast<std::size_t>(i)];
        p.Z(i, 0) = 1.0;
        for (int k = 0; k + 1 < stats.d; ++k) p.Z(i, k + 1) = static_cast<double>(get_bit(c, k));
        p.n[i] = static_cast<double>(stats.count(key.w, key.tr, c));
        p.t[i] = stats.time(key.w, key.s(), c);
    }
    if (!(p.total_time() > 0.0)) {
        throw Error(ErrorKind::DegenerateTriple, "node " + std::to_string(key.w) + " never occupies state " +
                                                     std::to_string(key.s()));
    }
    return p;
}

double loss_from_eta(const TripleProblem& p, const Eigen::VectorXd& eta) {
    if ((eta.array() > kExpCap).any()) return std::numeric_limits<double>::infinity();
    return (-p.n.dot(eta) + p.t.dot(eta.array().exp().matrix())) / p.T;
}

Eigen::VectorXd grad_from_eta(const TripleProblem& p, const Eigen::VectorXd& eta) {
    if ((eta.array() > kExpCap).any()) {
        return Eigen::VectorXd::Constant(p.d, std::numeric_limits<double>::infinity());
    }
    const Eigen::VectorXd resid = (p.t.array() * eta.array().exp() - p.n.array()).matrix();
    return p.Z.transpose() * resid / p.T;
}

double loss(const TripleProblem& p, const Eigen::VectorXd& theta) { return loss_from_eta(p, p.Z * theta); }

Eigen::VectorXd grad(const TripleProblem& p, const Eigen::VectorXd& theta) { return grad_from_eta(p, p.Z * theta); }

double hess_quad(const TripleProblem& p, const Eigen::VectorXd& theta, const Eigen::VectorXd& b) {
    const Eigen::VectorXd eta = p.Z * theta;
    const Eigen::VectorXd zb = p.Z * b;
    const Eigen::ArrayXd w = p.t.array() * eta.array().min(kExpCap).exp();
    return (w * zb.array().square()).sum() / p.T;
}

} // namespace ctbn
