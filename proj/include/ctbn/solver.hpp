#pragma once

// FISTA with backtracking for the L1-penalized per-triple problem
//   min_theta l(theta) + lambda * sum_{j >= 1} |theta_j|
// (the intercept theta_0 is unpenalized) and its warm-started lambda path.

#include <vector>

#include <Eigen/Dense>

#include "ctbn/objective.hpp"

namespace ctbn {

struct SolverConfig {
    int grid_size = 100;
    double lambda_min_ratio = 1e-3;
    double L0 = 1.0;     // initial Lipschitz guess
    double eta = 2.0;    // backtracking factor, L <- eta * L
    int max_iter = 5000;
    double tol = 1e-8;   // relative objective change; KKT certificate at 10 * tol
    /// Likelihood weight in BIC/GIC: Deviance uses 2 T l (twice the negative
    /// log-likelihood), PerJump uses n l with the 1/T-scaled loss.
    enum class Scale { Deviance, PerJump } criterion_scale = Scale::Deviance;

    /// Throws InvalidParameter on eta <= 1, tol <= 0, grid_size < 2, etc.
    void validate() const;
    double kkt_bound(double lambda) const;
};

inline double soft_threshold(double x, double k) noexcept {
    return x > k ? x - k : (x < -k ? x + k : 0.0);
}

/// Largest violation of the optimality conditions at theta: |g_0| for the
/// intercept, |g_j + lambda sign(theta_j)| for nonzero penalized j and
/// max(0, |g_j| - lambda) for zero ones.
double kkt_gap(const Eigen::VectorXd& gradient, const Eigen::VectorXd& theta, double lambda);

struct FistaResult {
    Eigen::VectorXd theta;
    double objective = 0.0;  // loss + lambda * |theta_pen|_1
    double loss = 0.0;
    double kkt_gap = 0.0;
    int iterations = 0;
    bool converged = false;
    double lipschitz = 0.0;  // final step constant L
};

/// Closed-form intercept of the empty model: log(sum n / sum t), floored at
/// log(1 / (T e)) when no jumps were observed.
double empty_model_intercept(const TripleProblem& p);

/// Smallest lambda for which the empty model is optimal. Throws
/// DegenerateTriple on a triple without occupation time.
double lambda_max(const TripleProblem& p);

/// `L_start` overrides cfg.L0 (used to carry the step constant along a path).
FistaResult fista(const TripleProblem& p, double lambda, const Eigen::VectorXd& theta0, const SolverConfig& cfg,
                  double L_start = 0.0);

struct LambdaPath {
    TripleKey key;
    double T = 0.0;
    std::vector<double> lambdas;           // strictly decreasing
    std::vector<Eigen::VectorXd> solutions;  // length d, intercept first
    std::vector<double> objectives;
    std::vector<double> losses;
    std::vector<double> kkt_gaps;
    std::vector<int> iterations;
    std::vector<char> converged;
    /// No jumps for this triple: the intercept sits at its floor and every
    /// solution is the empty model.
    bool floored = false;

    std::size_t size() const noexcept { return lambdas.size(); }
    int nnz(std::size_t i) const;
};

LambdaPath path(const TripleProblem& p, const SolverConfig& cfg);

} // namespace ctbn
