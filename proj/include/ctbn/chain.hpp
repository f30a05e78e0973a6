#pragma once

// Small-d analysis of the amalgamated generator over all 2^d configurations.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ctbn/model.hpp"

namespace ctbn {

inline constexpr int kMaxAmalgamatedNodes = 14;

/// Full intensity matrix over X, states indexed by StateMask. Rows sum to 0.
/// Throws Capacity for d > 14.
Eigen::SparseMatrix<double, Eigen::RowMajor> amalgamate(const CtbnModel& model);

struct ChainAnalysis {
    Eigen::VectorXd pi;
    /// Smallest positive eigenvalue of -(Q + Q*)/2, Q* the pi-adjoint of Q.
    double rho1 = 0.0;
    /// Largest off-diagonal intensity.
    double delta = 0.0;
    /// sqrt(sum_s nu(s)^2 / pi(s)^2).
    double nu_norm = 0.0;
    /// min over w, s, c_{S_w} of pi(s, c_{S_w}, 0) / 2.
    double zeta = 0.0;
};

/// Stationary distribution of `model` (sparse LU on the balance equations).
/// Throws NoUniqueStationary when the chain is reducible.
Eigen::VectorXd stationary_distribution(const CtbnModel& model);

/// `nu` is an initial distribution over X; pass an empty vector for nu = pi.
ChainAnalysis analyze_chain(const CtbnModel& model, const Eigen::VectorXd& nu = {});

/// True parent sets S_w used by the constants: the beta support when the
/// model carries beta, else the parent lists.
std::vector<std::vector<NodeId>> support_parents(const CtbnModel& model);

} // namespace ctbn
