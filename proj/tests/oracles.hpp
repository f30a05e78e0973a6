#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls the library's numerical kernels.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ctbn/model.hpp"
#include "ctbn/objective.hpp"
#include "ctbn/rng.hpp"
#include "ctbn/simulate.hpp"
#include "ctbn/stats.hpp"

namespace oracle {

/// Brute-force accumulator over dense arrays indexed by every restricted
/// configuration; zero entries dropped on output.
ctbn::SuffStats dense_extract(const ctbn::Trajectory& traj);

/// Small random triple problem with binary design, leading intercept column.
ctbn::TripleProblem random_problem(ctbn::SplitMix64& rng, int d, int rows, bool allow_zero_counts = true);

double loss(const ctbn::TripleProblem& p, const Eigen::VectorXd& theta);
/// Row-by-row analytic gradient.
Eigen::VectorXd plain_grad(const ctbn::TripleProblem& p, const Eigen::VectorXd& theta);
Eigen::VectorXd central_diff_grad(const ctbn::TripleProblem& p, const Eigen::VectorXd& theta, double h = 1e-5);

/// Plain proximal gradient (no momentum) with monotone backtracking.
struct IstaResult {
    Eigen::VectorXd theta;
    double objective = 0.0;
};
IstaResult ista(const ctbn::TripleProblem& p, double lambda, long iterations);

/// (1/T) times the joint negative log-likelihood of the path under the
/// log-linear intensities in beta: sum over jumps of -log Q plus the
/// integral of every node's leaving rate.
double joint_scaled_nll(const ctbn::Trajectory& traj, const ctbn::BetaMatrix& beta);

/// Two-node model with no edges and leaving rates (a, a), (b, b).
ctbn::CtbnModel independent_pair(double a, double b);

/// d-node model with random parents among lower indices and random rates
/// in [0.5, 5].
ctbn::CtbnModel random_model(ctbn::SplitMix64& rng, int d);

/// Random trajectory on d nodes drawn directly (no model), jump times in (0, T).
ctbn::Trajectory random_trajectory(ctbn::SplitMix64& rng, int d, double T, int max_jumps);

} // namespace oracle
