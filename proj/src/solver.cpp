#include "ctbn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctbn/error.hpp"

namespace ctbn {

void SolverConfig::validate() const {
    if (grid_size < 2) throw Error(ErrorKind::InvalidParameter, "grid_size must be >= 2");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0)) {
        throw Error(ErrorKind::InvalidParameter, "lambda_min_ratio must be in (0, 1)");
    }
    if (!(L0 > 0.0)) throw Error(ErrorKind::InvalidParameter, "L0 must be positive");
    if (!(eta > 1.0)) throw Error(ErrorKind::InvalidParameter, "eta must exceed 1");
    if (max_iter < 1) throw Error(ErrorKind::InvalidParameter, "max_iter must be >= 1");
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "tol must be positive");
}

double SolverConfig::kkt_bound(double lambda) const { return 10.0 * tol * std::max(1.0, lambda); }

double kkt_gap(const Eigen::VectorXd& gradient, const Eigen::VectorXd& theta, double lambda) {
    double gap = std::abs(gradient[0]);
    for (Eigen::Index j = 1; j < theta.size(); ++j) {
        const double v = theta[j] == 0.0 ? std::max(0.0, std::abs(gradient[j]) - lambda)
                                         : std::abs(gradient[j] + lambda * (theta[j] > 0.0 ? 1.0 : -1.0));
        gap = std::max(gap, v);
    }
    return gap;
}

namespace {

double penalty(const Eigen::VectorXd& theta) { return theta.tail(theta.size() - 1).lpNorm<1>(); }

bool certified(const Eigen::VectorXd& g, const Eigen::VectorXd& theta, double lambda, const SolverConfig& cfg,
               double& gap) {
    gap = kkt_gap(g, theta, lambda);
    return gap <= cfg.kkt_bound(lambda) && std::abs(g[0]) <= 10.0 * cfg.tol;
}

Eigen::VectorXd empty_model(const TripleProblem& p) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p.d);
    theta[0] = empty_model_intercept(p);
    return theta;
}

} // namespace

double empty_model_intercept(const TripleProblem& p) {
    const double sn = p.total_count();
    const double st = p.total_time();
    if (!(st > 0.0)) throw Error(ErrorKind::DegenerateTriple, "triple has no occupation time");
    if (sn <= 0.0) return std::log(1.0 / (p.T * std::exp(1.0)));
    return std::log(sn / st);
}

double lambda_max(const TripleProblem& p) {
    const Eigen::VectorXd theta = empty_model(p);
    const Eigen::VectorXd g = grad(p, theta);
    return g.size() > 1 ? g.tail(g.size() - 1).cwiseAbs().maxCoeff() : 0.0;
}

namespace {

// Exact reparameterization u_0 = theta_0 + sum_j m_j theta_j, u_j = s_j theta_j
// with t-weighted column means m_j and spreads s_j. Only the unpenalized
// coordinate absorbs the centering, so the penalty becomes sum_j |u_j| / s_j.
struct Standardized {
    Eigen::MatrixXd X;
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    explicit Standardized(const TripleProblem& p) : X(p.Z), mean(Eigen::VectorXd::Zero(p.d)), scale(Eigen::VectorXd::Ones(p.d)) {
        const double tt = p.total_time();
        for (Eigen::Index j = 1; j < p.d; ++j) {
            mean[j] = p.t.dot(p.Z.col(j)) / tt;
            X.col(j).array() -= mean[j];
            const double var = p.t.dot(X.col(j).cwiseAbs2()) / tt;
            if (var > 1e-12) scale[j] = std::sqrt(var);
            X.col(j) /= scale[j];
        }
    }

    Eigen::VectorXd to_u(const Eigen::VectorXd& theta) const {
        Eigen::VectorXd u = theta.cwiseProduct(scale);
        u[0] = theta[0] + mean.tail(mean.size() - 1).dot(theta.tail(theta.size() - 1));
        return u;
    }

    Eigen::VectorXd to_theta(const Eigen::VectorXd& u) const {
        Eigen::VectorXd theta = u.cwiseQuotient(scale);
        theta[0] = u[0] - mean.tail(mean.size() - 1).dot(theta.tail(theta.size() - 1));
        return theta;
    }
};

// Loss and u-space gradient from one exp pass.
double loss_and_grad(const TripleProblem& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& eta,
                     Eigen::VectorXd& expo, Eigen::VectorXd& g) {
    if ((eta.array() > kExpCap).any()) return std::numeric_limits<double>::infinity();
    expo = eta.array().exp().matrix();
    const double f = (-p.n.dot(eta) + p.t.dot(expo)) / p.T;
    expo = p.t.cwiseProduct(expo) - p.n;
    g.noalias() = X.transpose() * expo;
    g /= p.T;
    return f;
}

double weighted_penalty(const Eigen::VectorXd& u, const Eigen::VectorXd& scale) {
    return u.tail(u.size() - 1).cwiseQuotient(scale.tail(scale.size() - 1)).lpNorm<1>();
}

} // namespace

FistaResult fista(const TripleProblem& p, double lambda, const Eigen::VectorXd& theta0, const SolverConfig& cfg,
                  double L_start) {
    cfg.validate();
    if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidParameter, "lambda must be non-negative");
    if (theta0.size() != p.d) throw Error(ErrorKind::InvalidParameter, "theta0 must have length d");

    Eigen::VectorXd start = theta0;
    Eigen::VectorXd eta_prev = p.Z * start;
    double f_prev = loss_from_eta(p, eta_prev);
    if (!std::isfinite(f_prev) || !start.allFinite()) {
        start = empty_model(p);
        eta_prev = p.Z * start;
        f_prev = loss_from_eta(p, eta_prev);
    }
    double F_prev = f_prev + lambda * penalty(start);
    double L = L_start > 0.0 ? L_start : cfg.L0;

    FistaResult res;
    auto finish = [&](const Eigen::VectorXd& theta, double f, double F, double gap, int it, bool ok) {
        res.theta = theta;
        res.loss = f;
        res.objective = F;
        res.kkt_gap = gap;
        res.iterations = it;
        res.converged = ok;
        res.lipschitz = L;
        return res;
    };

    double gap = 0.0;
    if (certified(grad_from_eta(p, eta_prev), start, lambda, cfg, gap)) {
        return finish(start, f_prev, F_prev, gap, 0, true);
    }

    const Standardized st(p);
    Eigen::VectorXd x_prev = st.to_u(start);
    Eigen::VectorXd y = x_prev;
    Eigen::VectorXd eta_y = eta_prev;
    Eigen::VectorXd x(p.d);
    Eigen::VectorXd eta_x(p.rows());
    Eigen::VectorXd work(p.rows());
    Eigen::VectorXd g_y(p.d);
    Eigen::VectorXd diff(p.d);
    double t = 1.0;

    for (int it = 1; it <= cfg.max_iter; ++it) {
        double f_y = loss_and_grad(p, st.X, eta_y, work, g_y);
        if (!std::isfinite(f_y)) {
            // Extrapolation overflowed; drop the momentum.
            y = x_prev;
            eta_y = eta_prev;
            t = 1.0;
            f_y = loss_and_grad(p, st.X, eta_y, work, g_y);
        }

        double f_x = 0.0;
        for (;;) {
            x[0] = y[0] - g_y[0] / L;
            for (Eigen::Index j = 1; j < p.d; ++j) {
                x[j] = soft_threshold(y[j] - g_y[j] / L, lambda / (L * st.scale[j]));
            }
            eta_x.noalias() = st.X * x;
            f_x = loss_from_eta(p, eta_x);
            diff = x - y;
            const double bound = f_y + g_y.dot(diff) + 0.5 * L * diff.squaredNorm();
            if (f_x <= bound + 1e-14 * std::abs(f_y)) break;
            L *= cfg.eta;
            if (!std::isfinite(L)) break;
        }
        const double F_x = f_x + lambda * weighted_penalty(x, st.scale);

        const bool small_change = std::abs(F_x - F_prev) <= cfg.tol * std::max(1.0, std::abs(F_x));
        if (small_change || it % 25 == 0 || it == cfg.max_iter) {
            Eigen::VectorXd theta = st.to_theta(x);
            if (certified(grad_from_eta(p, eta_x), theta, lambda, cfg, gap)) {
                // Exact minimization over the unpenalized intercept.
                const double tn = p.n.sum();
                if (tn > 0.0) {
                    const double shift = std::log(tn / p.t.dot(eta_x.array().exp().matrix()));
                    Eigen::VectorXd eta_s = eta_x.array() + shift;
                    const double f_s = loss_from_eta(p, eta_s);
                    Eigen::VectorXd theta_s = theta;
                    theta_s[0] += shift;
                    double gap_s = 0.0;
                    if (std::isfinite(f_s) && f_s <= f_x + 1e-12 * std::abs(f_x) &&
                        certified(grad_from_eta(p, eta_s), theta_s, lambda, cfg, gap_s)) {
                        theta = theta_s;
                        f_x = f_s;
                        gap = gap_s;
                    }
                }
                return finish(theta, f_x, f_x + lambda * penalty(theta), gap, it, true);
            }
        }

        if (F_x > F_prev) {
            // Adaptive restart: the step from y did not decrease the objective.
            t = 1.0;
            y = x;
            eta_y = eta_x;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            const double m = (t - 1.0) / t_next;
            y = x + m * (x - x_prev);
            eta_y = eta_x + m * (eta_x - eta_prev);
            t = t_next;
        }
        x_prev = x;
        eta_prev = eta_x;
        F_prev = F_x;
        f_prev = f_x;
    }
    const Eigen::VectorXd theta = st.to_theta(x_prev);
    certified(grad_from_eta(p, eta_prev), theta, lambda, cfg, gap);
    return finish(theta, f_prev, F_prev, gap, cfg.max_iter, false);
}

int LambdaPath::nnz(std::size_t i) const {
    const auto& th = solutions.at(i);
    int k = 0;
    for (Eigen::Index j = 1; j < th.size(); ++j) k += th[j] != 0.0 ? 1 : 0;
    return k;
}

LambdaPath path(const TripleProblem& p, const SolverConfig& cfg) {
    cfg.validate();
    LambdaPath out;
    out.key = p.key;
    out.T = p.T;
    const double top = std::max(lambda_max(p), 1e-12);
    const auto G = static_cast<std::size_t>(cfg.grid_size);
    out.lambdas.resize(G);
    for (std::size_t i = 0; i < G; ++i) {
        out.lambdas[i] = top * std::pow(cfg.lambda_min_ratio, static_cast<double>(i) / static_cast<double>(G - 1));
    }

    const Eigen::VectorXd empty = empty_model(p);
    if (p.total_count() <= 0.0) {
        out.floored = true;
        const double f = loss(p, empty);
        Eigen::VectorXd g = grad(p, empty);
        g[0] = 0.0;  // the floored intercept is not a stationary point
        for (std::size_t i = 0; i < G; ++i) {
            out.solutions.push_back(empty);
            out.objectives.push_back(f);
            out.losses.push_back(f);
            out.kkt_gaps.push_back(kkt_gap(g, empty, out.lambdas[i]));
            out.iterations.push_back(0);
            out.converged.push_back(0);
        }
        return out;
    }

    Eigen::VectorXd warm = empty;
    double L = cfg.L0;
    for (std::size_t i = 0; i < G; ++i) {
        const FistaResult r = fista(p, out.lambdas[i], warm, cfg, L);
        L = r.lipschitz;
        warm = r.theta;
        out.solutions.push_back(r.theta);
        out.objectives.push_back(r.objective);
        out.losses.push_back(r.loss);
        out.kkt_gaps.push_back(r.kkt_gap);
        out.iterations.push_back(r.iterations);
        out.converged.push_back(r.converged ? 1 : 0);
    }
    return out;
}

} // namespace ctbn
