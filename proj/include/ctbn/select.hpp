#pragma once

// BIC choice of lambda, GIC choice of the coefficient threshold, and the
// edge set read off the thresholded coefficients.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ctbn/model.hpp"
#include "ctbn/objective.hpp"
#include "ctbn/solver.hpp"
#include "ctbn/stats.hpp"

namespace ctbn {

/// Number of nonzero penalized coordinates (intercept excluded).
int l0_norm(const Eigen::VectorXd& theta);

using CriterionScale = SolverConfig::Scale;

/// Weight on the loss in both criteria: n for PerJump, 2T for Deviance.
double criterion_weight(CriterionScale scale, std::int64_t n_jumps, double T);

/// argmin_i W * l(beta(i)) + log(n) * ||beta(i)||_0, ties toward larger lambda,
/// with W = criterion_weight(scale, n, path.T). n <= 1 selects index 0.
/// Throws InvalidInput on an empty path.
std::size_t bic_select(const LambdaPath& path, std::int64_t n_jumps, CriterionScale scale = CriterionScale::PerJump);

/// Criterion value used by bic_select for entry i.
double bic_value(const LambdaPath& path, std::size_t i, std::int64_t n_jumps,
                 CriterionScale scale = CriterionScale::PerJump);

/// Zeroes penalized coordinates with |value| <= delta; intercept untouched.
Eigen::VectorXd threshold(const Eigen::VectorXd& beta, double delta);

/// {0} plus the distinct penalized magnitudes of beta, ascending.
std::vector<double> threshold_grid(const Eigen::VectorXd& beta);

struct GicChoice {
    double delta = 0.0;
    Eigen::VectorXd beta;
    double gic = 0.0;
};

/// argmin over delta in grid of W * l(beta^delta) + log(2d(d-1)) * ||beta^delta||_0,
/// ties toward larger delta. An empty grid means threshold_grid(beta_hat).
GicChoice gic_threshold(const Eigen::VectorXd& beta_hat, const TripleProblem& p, std::int64_t n_jumps, int d,
                        const std::vector<double>& grid = {}, CriterionScale scale = CriterionScale::PerJump);

struct TripleSelection {
    TripleKey key;
    bool degenerate = false;
    std::size_t index = 0;
    double lambda = 0.0;
    double delta = 0.0;
    Eigen::VectorXd beta_pre;
    Eigen::VectorXd beta_post;
    double bic = 0.0;
    double gic = 0.0;
};

/// u -> w iff either transition of w has a nonzero post-threshold
/// coefficient at u. Needs selections for every triple of a d-node graph.
EdgeSet assemble_edges(const std::vector<TripleSelection>& selections, int d);

struct StructureFit {
    int d = 0;
    std::int64_t n_jumps = 0;
    std::vector<TripleSelection> selections;  // all_triples(d) order
    std::vector<std::optional<LambdaPath>> paths;  // empty for degenerate triples
    EdgeSet edges;
};

/// Full pipeline on sufficient statistics: per triple build, path, BIC,
/// GIC with cfg.criterion_scale; then the edge rule. A jump-free path
/// yields the empty graph.
StructureFit fit_structure(const SuffStats& stats, const SolverConfig& cfg, int threads = 1);

} // namespace ctbn
