#pragma once

// Per-(node, transition) negative log-likelihood
//   l(theta) = (1/T) sum_c [ -n(c) theta'Z(c) + t(c) exp(theta'Z(c)) ]
// with its gradient and Hessian quadratic form.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ctbn/model.hpp"
#include "ctbn/stats.hpp"

namespace ctbn {

struct TripleKey {
    NodeId w = 0;
    Transition tr = Transition::Up;
    int s() const noexcept { return source_state(tr); }
    int sp() const noexcept { return target_state(tr); }
    friend bool operator==(const TripleKey&, const TripleKey&) = default;
};

/// All 2d triples in the row order of the coefficient matrix.
std::vector<TripleKey> all_triples(int d);

struct TripleProblem {
    TripleKey key;
    int d = 0;
    double T = 0.0;
    std::vector<RestrictedMask> keys;
    /// rows x d design; column 0 is the intercept.
    Eigen::MatrixXd Z;
    Eigen::VectorXd n;
    Eigen::VectorXd t;

    Eigen::Index rows() const noexcept { return Z.rows(); }
    double total_count() const { return n.sum(); }
    double total_time() const { return t.sum(); }
};

/// Exponent cap: exp is only evaluated for arguments up to this value.
inline constexpr double kExpCap = 700.0;

bool is_degenerate(const SuffStats& stats, const TripleKey& key);

/// One row per key c with t_w(c; s) > 0 or n_w(c; s, s') > 0, ordered by key.
/// Throws DegenerateTriple when node w never occupies s.
TripleProblem build_triple(const SuffStats& stats, const TripleKey& key);

/// Returns +infinity when any linear predictor exceeds kExpCap.
double loss(const TripleProblem& p, const Eigen::VectorXd& theta);
Eigen::VectorXd grad(const TripleProblem& p, const Eigen::VectorXd& theta);
double hess_quad(const TripleProblem& p, const Eigen::VectorXd& theta, const Eigen::VectorXd& b);

// Forms taking a precomputed linear predictor eta = Z theta.
double loss_from_eta(const TripleProblem& p, const Eigen::VectorXd& eta);
Eigen::VectorXd grad_from_eta(const TripleProblem& p, const Eigen::VectorXd& eta);

} // namespace ctbn
