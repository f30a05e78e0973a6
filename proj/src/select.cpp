#include "ctbn/select.hpp"

#include <algorithm>
#include <cmath>

#include "ctbn/error.hpp"
#include "ctbn/parallel.hpp"

namespace ctbn {

int l0_norm(const Eigen::VectorXd& theta) {
    int k = 0;
    for (Eigen::Index j = 1; j < theta.size(); ++j) k += theta[j] != 0.0 ? 1 : 0;
    return k;
}

double criterion_weight(CriterionScale scale, std::int64_t n_jumps, double T) {
    return scale == CriterionScale::Deviance ? 2.0 * T : static_cast<double>(n_jumps);
}

double bic_value(const LambdaPath& path, std::size_t i, std::int64_t n_jumps, CriterionScale scale) {
    const auto n = static_cast<double>(n_jumps);
    return criterion_weight(scale, n_jumps, path.T) * path.losses.at(i) + std::log(n) * static_cast<double>(path.nnz(i));
}

std::size_t bic_select(const LambdaPath& path, std::int64_t n_jumps, CriterionScale scale) {
    if (path.size() == 0) throw Error(ErrorKind::InvalidInput, "empty lambda path");
    if (n_jumps <= 1) return 0;
    std::size_t best = 0;
    double best_val = bic_value(path, 0, n_jumps, scale);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double v = bic_value(path, i, n_jumps, scale);
        if (v < best_val) {
            best = i;
            best_val = v;
        }
    }
    return best;
}

Eigen::VectorXd threshold(const Eigen::VectorXd& beta, double delta) {
    Eigen::VectorXd out = beta;
    for (Eigen::Index j = 1; j < out.size(); ++j) {
        if (std::abs(out[j]) <= delta) out[j] = 0.0;
    }
    return out;
}

std::vector<double> threshold_grid(const Eigen::VectorXd& beta) {
    std::vector<double> grid{0.0};
    for (Eigen::Index j = 1; j < beta.size(); ++j) {
        if (beta[j] != 0.0) grid.push_back(std::abs(beta[j]));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

GicChoice gic_threshold(const Eigen::VectorXd& beta_hat, const TripleProblem& p, std::int64_t n_jumps, int d,
                        const std::vector<double>& grid, CriterionScale scale) {
    const std::vector<double> omega = grid.empty() ? threshold_grid(beta_hat) : grid;
    const double weight = criterion_weight(scale, n_jumps, p.T);
    const double complexity = std::log(2.0 * d * (d - 1));
    GicChoice best;
    bool have = false;
    for (double delta : omega) {
        Eigen::VectorXd b = threshold(beta_hat, delta);
        const double v = weight * loss(p, b) + complexity * static_cast<double>(l0_norm(b));
        if (!have || v < best.gic || (v == best.gic && delta > best.delta)) {
            best.delta = delta;
            best.beta = std::move(b);
            best.gic = v;
            have = true;
        }
    }
    return best;
}

EdgeSet assemble_edges(const std::vector<TripleSelection>& selections, int d) {
    if (selections.size() != 2 * static_cast<std::size_t>(d)) {
        throw Error(ErrorKind::InvalidInput, "need both triples of every node");
    }
    EdgeSet out;
    for (const auto& sel : selections) {
        const NodeId w = sel.key.w;
        if (sel.beta_post.size() != d) continue;
        for (int k = 0; k + 1 < d; ++k) {
            if (sel.beta_post[k + 1] != 0.0) out.emplace(node_at_rest(k, w), w);
        }
    }
    return out;
}

StructureFit fit_structure(const SuffStats& stats, const SolverConfig& cfg, int threads) {
    cfg.validate();
    StructureFit out;
    out.d = stats.d;
    out.n_jumps = total_jumps(stats);
    const auto keys = all_triples(stats.d);
    out.selections.resize(keys.size());
    out.paths.resize(keys.size());

    parallel_for(keys.size(), threads, [&](std::size_t i) {
        TripleSelection& sel = out.selections[i];
        sel.key = keys[i];
        sel.beta_pre = Eigen::VectorXd::Zero(stats.d);
        sel.beta_post = sel.beta_pre;
        if (out.n_jumps == 0 || is_degenerate(stats, keys[i])) {
            sel.degenerate = is_degenerate(stats, keys[i]);
            return;
        }
        const TripleProblem p = build_triple(stats, keys[i]);
        LambdaPath lp = path(p, cfg);
        sel.index = bic_select(lp, out.n_jumps, cfg.criterion_scale);
        sel.lambda = lp.lambdas[sel.index];
        sel.beta_pre = lp.solutions[sel.index];
        sel.bic = bic_value(lp, sel.index, out.n_jumps, cfg.criterion_scale);
        const GicChoice g = gic_threshold(sel.beta_pre, p, out.n_jumps, stats.d, {}, cfg.criterion_scale);
        sel.delta = g.delta;
        sel.beta_post = g.beta;
        sel.gic = g.gic;
        out.paths[i] = std::move(lp);
    });
    out.edges = assemble_edges(out.selections, stats.d);
    return out;
}

} // namespace ctbn
