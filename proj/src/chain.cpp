#include "ctbn/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include <Eigen/SparseLU>

#include "ctbn/error.hpp"

namespace ctbn {

namespace {

using SparseRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;

void check_size(const CtbnModel& model) {
    if (model.d() > kMaxAmalgamatedNodes) {
        throw Error(ErrorKind::Capacity, "amalgamation is limited to d <= " + std::to_string(kMaxAmalgamatedNodes) +
                                             " (2^d states); got d = " + std::to_string(model.d()));
    }
}

bool reaches_all(const SparseRow& adj) {
    const auto n = adj.rows();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::deque<Eigen::Index> queue{0};
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!queue.empty()) {
        const auto s = queue.front();
        queue.pop_front();
        for (SparseRow::InnerIterator it(adj, s); it; ++it) {
            if (it.col() == s || it.value() <= 0.0) continue;
            auto& flag = seen[static_cast<std::size_t>(it.col())];
            if (!flag) {
                flag = 1;
                ++count;
                queue.push_back(it.col());
            }
        }
    }
    return count == n;
}

// Lanczos with full reorthogonalization for the smallest eigenvalue of the
// PSD operator `m` restricted to the complement of the unit vector `null`.
// The null direction is also shifted up by `shift` (Hotelling deflation) so
// round-off leaking back into it cannot produce a spurious zero Ritz value.
double smallest_on_complement(const SparseRow& m, const Eigen::VectorXd& null, double shift) {
    const Eigen::Index n = m.rows();
    const Eigen::Index steps = std::min<Eigen::Index>(n - 1, 400);
    Eigen::MatrixXd basis(n, steps);
    std::vector<double> alpha;
    std::vector<double> beta;

    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) q[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i) * 1.618);
    q -= null.dot(q) * null;
    q.normalize();

    for (Eigen::Index j = 0; j < steps; ++j) {
        basis.col(j) = q;
        Eigen::VectorXd r = m * q + shift * null.dot(q) * null;
        alpha.push_back(q.dot(r));
        r -= null.dot(r) * null;
        for (int pass = 0; pass < 2; ++pass) {
            r -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * r);
        }
        const double b = r.norm();
        if (b < 1e-12 || j + 1 == steps) break;
        beta.push_back(b);
        q = r / b;
    }
    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        tri(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace

SparseRow amalgamate(const CtbnModel& model) {
    check_size(model);
    const int d = model.d();
    const auto n = static_cast<Eigen::Index>(std::size_t{1} << d);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d + 1));
    for (Eigen::Index s = 0; s < n; ++s) {
        double out = 0.0;
        for (NodeId w = 0; w < d; ++w) {
            const double q = model.rate(static_cast<StateMask>(s), w);
            trip.emplace_back(s, s ^ (Eigen::Index{1} << w), q);
            out += q;
        }
        trip.emplace_back(s, s, -out);
    }
    SparseRow q(n, n);
    q.setFromTriplets(trip.begin(), trip.end());
    return q;
}

Eigen::VectorXd stationary_distribution(const CtbnModel& model) {
    const SparseRow q = amalgamate(model);
    const auto n = q.rows();
    if (!reaches_all(q) || !reaches_all(SparseRow(q.transpose()))) {
        throw Error(ErrorKind::NoUniqueStationary, "generator is reducible");
    }
    // Balance equations pi Q = 0 with the last one replaced by sum(pi) = 1.
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index s = 0; s < n; ++s) {
        for (SparseRow::InnerIterator it(q, s); it; ++it) {
            if (it.col() != n - 1) trip.emplace_back(it.col(), s, it.value());
        }
        trip.emplace_back(n - 1, s, 1.0);
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::NoUniqueStationary, "balance equations are singular");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[n - 1] = 1.0;
    Eigen::VectorXd pi = lu.solve(rhs);
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
    return pi;
}

std::vector<std::vector<NodeId>> support_parents(const CtbnModel& model) {
    if (!model.beta()) return model.parent_lists();
    std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(model.d()));
    for (const auto& [u, w] : edges_from_beta(*model.beta())) out[static_cast<std::size_t>(w)].push_back(u);
    return out;
}

ChainAnalysis analyze_chain(const CtbnModel& model, const Eigen::VectorXd& nu) {
    const SparseRow q = amalgamate(model);
    const auto n = q.rows();
    ChainAnalysis out;
    out.pi = stationary_distribution(model);
    const Eigen::VectorXd& pi = out.pi;

    for (Eigen::Index s = 0; s < n; ++s) {
        for (SparseRow::InnerIterator it(q, s); it; ++it) {
            if (it.col() != s) out.delta = std::max(out.delta, it.value());
        }
    }

    // ||nu||_2^2 = sum_s nu(s)^2 / pi(s)^2; nu = pi gives 2^d.
    const Eigen::VectorXd& start = nu.size() == 0 ? pi : nu;
    if (start.size() != n) throw Error(ErrorKind::InvalidInput, "initial distribution has wrong length");
    out.nu_norm = std::sqrt(start.cwiseQuotient(pi).squaredNorm());

    // Symmetric similarity transform of the additive symmetrization:
    // B = D^{1/2} (Q + Q*)/2 D^{-1/2} with D = diag(pi).
    const Eigen::VectorXd sq = pi.cwiseSqrt();
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index s = 0; s < n; ++s) {
        for (SparseRow::InnerIterator it(q, s); it; ++it) {
            const auto t = it.col();
            const double v = 0.5 * it.value() * sq[s] / sq[t];
            trip.emplace_back(s, t, -v);
            trip.emplace_back(t, s, -v);
        }
    }
    SparseRow neg_b(n, n);
    neg_b.setFromTriplets(trip.begin(), trip.end());
    const Eigen::VectorXd null = sq / sq.norm();
    if (n <= 1024) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(neg_b), Eigen::EigenvaluesOnly);
        const double tol = 1e-9 * std::max(1.0, out.delta);
        out.rho1 = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (es.eigenvalues()[i] > tol) {
                out.rho1 = es.eigenvalues()[i];
                break;
            }
        }
    } else {
        double shift = 0.0;
        for (Eigen::Index s = 0; s < n; ++s) shift = std::max(shift, 2.0 * neg_b.coeff(s, s));
        out.rho1 = smallest_on_complement(neg_b, null, shift + 1.0);
    }

    const auto sw = support_parents(model);
    double min_pi = 1.0;
    for (NodeId w = 0; w < model.d(); ++w) {
        const auto& par = sw[static_cast<std::size_t>(w)];
        const std::size_t combos = std::size_t{1} << par.size();
        for (int s = 0; s < 2; ++s) {
            for (std::size_t idx = 0; idx < combos; ++idx) {
                StateMask state = static_cast<StateMask>(s) << w;
                for (std::size_t i = 0; i < par.size(); ++i) {
                    if ((idx >> i) & 1U) state |= StateMask{1} << par[i];
                }
                min_pi = std::min(min_pi, pi[static_cast<Eigen::Index>(state)]);
            }
        }
    }
    out.zeta = min_pi / 2.0;
    return out;
}

} // namespace ctbn
