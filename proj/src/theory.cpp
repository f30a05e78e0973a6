#include "ctbn/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ctbn/error.hpp"
#include "ctbn/rng.hpp"

namespace ctbn {

double a_beta(const BetaMatrix& beta) {
    double total = 0.0;
    int count = 0;
    for (const auto& key : all_triples(beta.d())) {
        for (double v : beta.row(key.w, key.tr).coef) {
            if (v != 0.0) {
                total += std::exp(-v);
                ++count;
            }
        }
    }
    if (count == 0) throw Error(ErrorKind::UndefinedBound, "beta has no nonzero penalized coefficient");
    return total;
}

CifReport cif_report(const BetaMatrix& beta, double xi) {
    if (!(xi > 1.0)) throw Error(ErrorKind::InvalidParameter, "xi must exceed 1");
    CifReport r;
    r.xi = xi;
    r.A_beta = a_beta(beta);
    r.F_lower = 1.0 / (xi * r.A_beta);
    r.beta_min = std::numeric_limits<double>::infinity();
    for (const auto& key : all_triples(beta.d())) {
        for (double v : beta.row(key.w, key.tr).coef) {
            if (v != 0.0) {
                ++r.S_size;
                r.beta_min = std::min(r.beta_min, std::abs(v));
            }
        }
    }
    std::vector<int> parents(static_cast<std::size_t>(beta.d()), 0);
    for (const auto& e : edges_from_beta(beta)) ++parents[static_cast<std::size_t>(e.second)];
    r.max_Sw = *std::max_element(parents.begin(), parents.end());
    return r;
}

double theorem_K(int d) {
    const double e2 = std::exp(2.0);
    return 2.0 * (2.0 + e2) * static_cast<double>(d) * static_cast<double>(d - 1);
}

TheoremBounds theorem_bounds(const CtbnModel& model, const ChainAnalysis& analysis, double xi, double epsilon,
                             double T) {
    if (!model.beta()) throw Error(ErrorKind::Unsupported, "model has no log-linear beta representation");
    if (model.d() > kMaxAmalgamatedNodes) {
        throw Error(ErrorKind::Unsupported, "theory constants need the amalgamated chain (d <= 14)");
    }
    if (!(xi > 1.0)) throw Error(ErrorKind::InvalidParameter, "xi must exceed 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::InvalidParameter, "epsilon must be in (0, 1)");

    TheoremBounds b;
    b.xi = xi;
    b.epsilon = epsilon;
    b.cif = cif_report(*model.beta(), xi);
    b.K = theorem_K(model.d());
    b.zeta = analysis.zeta;
    b.rho1 = analysis.rho1;
    b.delta = analysis.delta;
    b.nu_norm = analysis.nu_norm;

    const double min_pi = 2.0 * analysis.zeta;
    const double numer = 36.0 * ((b.cif.max_Sw + 1) * std::log(2.0) +
                                 std::log(model.d() * analysis.nu_norm / epsilon));
    b.T_min = numer / (min_pi * min_pi * analysis.rho1);
    b.T = T > 0.0 ? T : b.T_min;

    const double F = b.cif.F_lower;
    b.lambda_lo = 2.0 * (xi + 1.0) / (xi - 1.0) * std::log(b.K / epsilon) * std::sqrt(analysis.delta / b.T);
    b.lambda_hi = 2.0 * analysis.zeta * F / (std::numbers::e * (xi + 1.0) * b.cif.S_size);
    b.R = 2.0 * std::numbers::e * xi * b.lambda_lo / ((xi + 1.0) * analysis.zeta * F);
    b.vacuous = b.lambda_lo > b.lambda_hi || b.T < b.T_min || b.T * analysis.delta < 2.0;
    return b;
}

double martingale_residual(const SuffStats& stats, const CtbnModel& model, const TripleKey& key, int k) {
    if (k < 0 || k >= stats.d) throw Error(ErrorKind::InvalidParameter, "coordinate must be in [0, d)");
    if (stats.d != model.d()) throw Error(ErrorKind::InvalidInput, "statistics and model differ in d");
    const auto& ns = stats.node(key.w);
    const auto s = static_cast<std::size_t>(key.s());
    auto selected = [k](RestrictedMask c) { return k == 0 || get_bit(c, k - 1) == 1; };
    double m = 0.0;
    for (const auto& [c, cnt] : ns.counts[s]) {
        if (selected(c)) m += static_cast<double>(cnt);
    }
    for (const auto& [c, secs] : ns.times[s]) {
        if (selected(c)) m -= secs * model.rate_restricted(key.w, key.tr, c);
    }
    return m;
}

double martingale_residual(const Trajectory& traj, const CtbnModel& model, const TripleKey& key, int k) {
    return martingale_residual(extract(traj), model, key, k);
}

SandwichTerms sandwich_terms(const TripleProblem& p, const Eigen::VectorXd& beta, const Eigen::VectorXd& b) {
    SandwichTerms out;
    const Eigen::VectorXd zb = p.Z * b;
    out.c_b = zb.size() == 0 ? 1.0 : std::exp(zb.cwiseAbs().maxCoeff());
    const double h = hess_quad(p, beta, b);
    out.middle = b.dot(grad(p, beta + b) - grad(p, beta));
    out.lower = h / out.c_b;
    out.upper = out.c_b * h;
    return out;
}

bool sandwich_check(const TripleProblem& p, const Eigen::VectorXd& beta, const Eigen::VectorXd& b) {
    const SandwichTerms st = sandwich_terms(p, beta, b);
    const double slack = 1e-10 * (1.0 + std::abs(st.middle));
    return st.lower <= st.middle + slack && st.middle <= st.upper + slack;
}

double cone_factor_estimate(const BetaMatrix& beta, double xi, int n_dirs, std::uint64_t seed) {
    if (!(xi > 1.0)) throw Error(ErrorKind::InvalidParameter, "xi must exceed 1");
    const int d = beta.d();
    const auto keys = all_triples(d);
    const std::size_t per_row = static_cast<std::size_t>(d - 1);

    std::vector<char> in_support(keys.size() * per_row, 0);
    std::vector<std::vector<NodeId>> sw(static_cast<std::size_t>(d));
    for (const auto& e : edges_from_beta(beta)) sw[static_cast<std::size_t>(e.second)].push_back(e.first);
    for (std::size_t r = 0; r < keys.size(); ++r) {
        const auto& coef = beta.row(keys[r].w, keys[r].tr).coef;
        for (std::size_t j = 0; j < per_row; ++j) in_support[r * per_row + j] = coef[j] != 0.0 ? 1 : 0;
    }

    SplitMix64 rng(seed);
    auto normal = [&rng] {
        const double u1 = 1.0 - rng.uniform();
        const double u2 = rng.uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    };

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> theta(in_support.size());
    for (int it = 0; it < n_dirs; ++it) {
        double l1_s = 0.0, l1_sc = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            theta[i] = normal();
            (in_support[i] ? l1_s : l1_sc) += std::abs(theta[i]);
        }
        if (l1_s == 0.0) return std::numeric_limits<double>::quiet_NaN();
        // Rescale off-support mass to a uniform fraction of the cone budget.
        const double target = rng.uniform() * xi * l1_s;
        if (l1_sc > 0.0) {
            for (std::size_t i = 0; i < theta.size(); ++i) {
                if (!in_support[i]) theta[i] *= target / l1_sc;
            }
        }
        double sup = 0.0;
        for (double v : theta) sup = std::max(sup, std::abs(v));

        double quad = 0.0;
        for (std::size_t r = 0; r < keys.size(); ++r) {
            const auto& par = sw[static_cast<std::size_t>(keys[r].w)];
            for (std::size_t idx = 0; idx < (std::size_t{1} << par.size()); ++idx) {
                RestrictedMask c = 0;
                for (std::size_t i = 0; i < par.size(); ++i) {
                    if ((idx >> i) & 1U) c |= RestrictedMask{1} << position_in_rest(par[i], keys[r].w);
                }
                double lin = 0.0;
                for (std::size_t j = 0; j < per_row; ++j) {
                    if ((c >> j) & 1U) lin += theta[r * per_row + j];
                }
                quad += std::exp(beta.log_rate(keys[r].w, keys[r].tr, c)) * lin * lin;
            }
        }
        best = std::min(best, quad / (l1_s * sup));
    }
    return best;
}

} // namespace ctbn
