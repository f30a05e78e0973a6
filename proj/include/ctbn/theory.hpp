#pragma once

// Computable constants of the consistency guarantee and empirical checks of
// the martingale and curvature-sandwich identities it rests on.

#include <cstdint>

#include <Eigen/Dense>

#include "ctbn/chain.hpp"
#include "ctbn/model.hpp"
#include "ctbn/objective.hpp"
#include "ctbn/simulate.hpp"
#include "ctbn/stats.hpp"

namespace ctbn {

/// Sum of exp(-beta_j) over the nonzero penalized coefficients (intercepts
/// excluded). Throws UndefinedBound when there are none.
double a_beta(const BetaMatrix& beta);

struct CifReport {
    double xi = 0.0;
    double A_beta = 0.0;
    double F_lower = 0.0;  // 1 / (xi * A_beta)
    double beta_min = 0.0;
    int S_size = 0;
    int max_Sw = 0;
};

CifReport cif_report(const BetaMatrix& beta, double xi);

/// K = 2 (2 + e^2) d (d - 1).
double theorem_K(int d);

struct TheoremBounds {
    double xi = 0.0;
    double epsilon = 0.0;
    double T = 0.0;          // horizon at which the lambda window and R are evaluated
    double K = 0.0;
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    double T_min = 0.0;
    double R = 0.0;          // error radius at lambda = lambda_lo
    double zeta = 0.0;
    double rho1 = 0.0;
    double delta = 0.0;
    double nu_norm = 0.0;
    CifReport cif;
    /// Window empty, T below T_min, or T * Delta < 2.
    bool vacuous = false;
};

/// Requires model.beta(). `T <= 0` evaluates the window at T = T_min.
/// Throws Unsupported without beta, InvalidParameter for xi <= 1 or
/// epsilon outside (0, 1).
TheoremBounds theorem_bounds(const CtbnModel& model, const ChainAnalysis& analysis, double xi, double epsilon,
                             double T = 0.0);

/// M(T) = sum over c with Z_w(c)[k] = 1 of n_w(c; s, s') - t_w(c; s) Q_w(c; s, s').
/// k = 0 is the intercept column (every c); k >= 1 is node node_at_rest(k-1, w).
double martingale_residual(const SuffStats& stats, const CtbnModel& model, const TripleKey& key, int k);
double martingale_residual(const Trajectory& traj, const CtbnModel& model, const TripleKey& key, int k);

struct SandwichTerms {
    double lower = 0.0;
    double middle = 0.0;
    double upper = 0.0;
    double c_b = 1.0;
};

SandwichTerms sandwich_terms(const TripleProblem& p, const Eigen::VectorXd& beta, const Eigen::VectorXd& b);

/// c_b^{-1} b'H b <= b'[grad(beta + b) - grad(beta)] <= c_b b'H b up to
/// 1e-10 (1 + |middle|).
bool sandwich_check(const TripleProblem& p, const Eigen::VectorXd& beta, const Eigen::VectorXd& b);

/// Random-direction estimate of the cone factor F(xi) with c_{-S_w} = 0
/// (an upper estimate of an infimum; diagnostic only).
double cone_factor_estimate(const BetaMatrix& beta, double xi, int n_dirs, std::uint64_t seed);

} // namespace ctbn
