#include <doctest.h>

#include <cmath>

#include "ctbn/error.hpp"
#include "ctbn/rng.hpp"
#include "ctbn/select.hpp"
#include "ctbn/simulate.hpp"
#include "oracles.hpp"

using namespace ctbn;

namespace {

LambdaPath fake_path(std::vector<double> losses, std::vector<int> nnz) {
    LambdaPath lp;
    lp.T = 1.0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        lp.lambdas.push_back(1.0 / static_cast<double>(i + 1));
        Eigen::VectorXd th = Eigen::VectorXd::Zero(4);
        for (int j = 0; j < nnz[i]; ++j) th[j + 1] = 0.5;
        lp.solutions.push_back(th);
        lp.losses.push_back(losses[i]);
        lp.objectives.push_back(losses[i]);
        lp.kkt_gaps.push_back(0.0);
        lp.iterations.push_back(0);
        lp.converged.push_back(1);
    }
    return lp;
}

// Rows over (z1, z2) in {0,1}^2 with true log-rate 2 z1, t = 10 each.
TripleProblem strong_signal() {
    TripleProblem p;
    p.d = 3;
    p.T = 40.0;
    p.Z.resize(4, 3);
    p.n.resize(4);
    p.t = Eigen::VectorXd::Constant(4, 10.0);
    for (int r = 0; r < 4; ++r) {
        const int a = r & 1, b = r >> 1;
        p.Z.row(r) << 1.0, a, b;
        p.n[r] = std::round(10.0 * std::exp(2.0 * a));
        p.keys.push_back(static_cast<RestrictedMask>(r));
    }
    return p;
}

std::vector<TripleSelection> zero_selections(int d) {
    std::vector<TripleSelection> out;
    for (const auto& k : all_triples(d)) {
        TripleSelection s;
        s.key = k;
        s.beta_pre = s.beta_post = Eigen::VectorXd::Zero(d);
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST_CASE("bic_select") {
    const LambdaPath best_empty = fake_path({1.0, 1.0, 0.99}, {0, 1, 2});
    CHECK(bic_select(best_empty, 100) == 0);
    // Exact tie at indices 1 and 2 -> the larger lambda.
    const LambdaPath tie = fake_path({2.0, 1.0, 1.0}, {0, 1, 1});
    CHECK(bic_value(tie, 1, 50) == bic_value(tie, 2, 50));
    CHECK(bic_select(tie, 50) == 1);
    CHECK(bic_select(fake_path({5.0, 0.0}, {0, 3}), 1) == 0);
    CHECK_THROWS_AS(bic_select(LambdaPath{}, 10), Error);
    CHECK(criterion_weight(CriterionScale::PerJump, 17, 3.0) == 17.0);
    CHECK(criterion_weight(CriterionScale::Deviance, 17, 3.0) == 6.0);
}

TEST_CASE("threshold grid and idempotence") {
    Eigen::VectorXd b(5);
    b << 9.0, 0.3, -0.3, 0.0, -1.2;
    CHECK(threshold_grid(b) == std::vector<double>{0.0, 0.3, 1.2});
    const Eigen::VectorXd t = threshold(b, 0.3);
    CHECK(t[0] == 9.0);
    CHECK(t[1] == 0.0);
    CHECK(t[4] == -1.2);
    SplitMix64 rng(2);
    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd v(6);
        for (int j = 0; j < 6; ++j) v[j] = rng.uniform() - 0.5;
        const double d1 = rng.uniform() * 0.5, d2 = d1 + rng.uniform() * 0.5;
        CHECK(threshold(threshold(v, d1), d1) == threshold(v, d1));
        const Eigen::VectorXd a = threshold(v, d1), c = threshold(v, d2);
        for (int j = 1; j < 6; ++j) {
            if (c[j] != 0.0) CHECK(a[j] != 0.0);
            if (c[j] != 0.0) CHECK(c[j] == v[j]);
        }
    }
}

TEST_CASE("gic_threshold") {
    const TripleProblem p = strong_signal();
    const auto n = static_cast<std::int64_t>(p.n.sum());

    Eigen::VectorXd zeros = Eigen::VectorXd::Zero(3);
    const GicChoice z = gic_threshold(zeros, p, n, 3, {0.0, 0.5, 1.0});
    CHECK(z.delta == 1.0);
    CHECK(z.beta == zeros);

    Eigen::VectorXd b(3);
    b << 0.0, 2.0, 0.001;
    for (auto scale : {CriterionScale::PerJump, CriterionScale::Deviance}) {
        const GicChoice g = gic_threshold(b, p, n, 3, {}, scale);
        CHECK(g.beta[1] == 2.0);
        CHECK(g.beta[2] == 0.0);
        CHECK(g.beta[0] == 0.0);
        // Thresholding again at the chosen level changes nothing.
        CHECK(threshold(g.beta, g.delta) == g.beta);
    }
    const GicChoice same = gic_threshold(b, p, n, 3, {0.0});
    CHECK(same.beta == b);
    CHECK(same.delta == 0.0);
}

TEST_CASE("assemble_edges") {
    auto sel = zero_selections(3);
    CHECK(assemble_edges(sel, 3).empty());
    // beta^2_{0,1}(1) = 0.7: node 1 sits at position 1 of -2.
    sel[4].beta_post[2] = 0.7;
    CHECK(assemble_edges(sel, 3) == EdgeSet{{1, 2}});
    sel[5].beta_post[2] = -0.3;
    CHECK(assemble_edges(sel, 3) == EdgeSet{{1, 2}});
    sel.pop_back();
    CHECK_THROWS_AS(assemble_edges(sel, 3), Error);
}

TEST_CASE("jump-free path yields the empty graph") {
    Trajectory t;
    t.d = 4;
    t.T = 3.0;
    t.initial = 0b0110;
    const StructureFit fit = fit_structure(extract(t), SolverConfig{});
    CHECK(fit.edges.empty());
    CHECK(fit.n_jumps == 0);
    CHECK(fit.selections.size() == 8);
}

TEST_CASE("fit is thread-count invariant") {
    const CtbnModel m = make_m1(6, 4);
    const SuffStats st = extract(sample_path(m, Stationary{}, 20.0, 4));
    const StructureFit a = fit_structure(st, SolverConfig{}, 1);
    const StructureFit b = fit_structure(st, SolverConfig{}, 3);
    CHECK(a.edges == b.edges);
    for (std::size_t i = 0; i < a.selections.size(); ++i) {
        CHECK(a.selections[i].beta_post == b.selections[i].beta_post);
        CHECK(a.selections[i].lambda == b.selections[i].lambda);
    }
    for (const auto& s : a.selections) {
        for (Eigen::Index j = 1; j < s.beta_post.size(); ++j) {
            if (s.beta_post[j] != 0.0) {
                CHECK(s.beta_post[j] == s.beta_pre[j]);
                CHECK(std::abs(s.beta_post[j]) > s.delta);
            }
        }
    }
    for (auto [u, w] : a.edges) CHECK(u != w);
}

TEST_CASE("one strong edge is selected in at least 95 of 100 runs") {
    std::vector<NodeCim> cims(3);
    cims[0].rates = {{5.0, 5.0}};
    cims[1].rates = {{1.0, 9.0}, {9.0, 1.0}};
    cims[2].rates = {{5.0, 5.0}};
    const CtbnModel m(3, {{}, {0}, {}}, cims);
    int hits = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        const SuffStats st = extract(sample_path(m, Stationary{}, 50.0, derive_seed(123, r)));
        const TripleProblem p = build_triple(st, {1, Transition::Up});
        const LambdaPath lp = path(p, SolverConfig{});
        const std::size_t i = bic_select(lp, total_jumps(st), CriterionScale::Deviance);
        hits += lp.solutions[i][1] != 0.0 ? 1 : 0;
    }
    CHECK(hits >= 95);
}
