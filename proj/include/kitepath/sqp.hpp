#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

#include "kitepath/errors.hpp"
#include "kitepath/qp.hpp"

namespace kitepath::opt {

/// Smooth inequality-constrained problem
///   min f(x)  s.t.  g(x) <= 0 componentwise,  lower <= x <= upper.
/// Derivatives are not supplied; the solver differentiates numerically.
struct NlpProblem {
    std::function<double(const Eigen::VectorXd&)> objective;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> constraints;  // size m, may be 0
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

struct SqpOptions {
    int max_iterations = 200;
    double tol_stationarity = 1e-6;  // scaled by max(1, |grad f|_inf)
    double tol_feasibility = 1e-6;
    double fd_rel_step = 1e-6;       // h_i = step * max(1, |x_i|), central differences
};

struct SqpResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    Eigen::VectorXd constraint_values;
    Eigen::VectorXd multipliers;        // nonlinear rows
    Eigen::VectorXd lower_multipliers;  // box rows
    Eigen::VectorXd upper_multipliers;
    double stationarity = std::numeric_limits<double>::infinity();
    double feasibility = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double rel_step) {
    const auto n = x.size();
    Eigen::VectorXd grad(n);
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x(i)));
        probe(i) = x(i) + h;
        const double fp = f(probe);
        probe(i) = x(i) - h;
        const double fm = f(probe);
        probe(i) = x(i);
        grad(i) = (fp - fm) / (2.0 * h);
    }
    return grad;
}

inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g,
                                   const Eigen::VectorXd& x, Eigen::Index m, double rel_step) {
    const auto n = x.size();
    Eigen::MatrixXd jac(m, n);
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x(i)));
        probe(i) = x(i) + h;
        const Eigen::VectorXd gp = g(probe);
        probe(i) = x(i) - h;
        const Eigen::VectorXd gm = g(probe);
        probe(i) = x(i);
        jac.col(i) = (gp - gm) / (2.0 * h);
    }
    return jac;
}

}  // namespace detail

/// Sequential quadratic programming with an l1 merit line search.
///
/// Each iteration linearizes the constraints, builds a strictly convex QP from
/// a damped-BFGS model of the Lagrangian Hessian, and solves it with the dual
/// active-set method. When the linearized constraints are inconsistent the QP
/// is re-solved in elastic mode (one slack shared by all nonlinear rows), which
/// yields a violation-reducing direction, so infeasible starts are never fatal.
/// Running out of iterations is reported via converged=false with the best
/// iterate found, not an exception.
inline SqpResult solve_sqp(const NlpProblem& prob, Eigen::VectorXd x0,
                           const SqpOptions& opts = {}) {
    const auto n = x0.size();
    for (Eigen::Index i = 0; i < n; ++i)
        x0(i) = std::min(std::max(x0(i), prob.lower(i)), prob.upper(i));

    Eigen::VectorXd x = x0;
    double f = prob.objective(x);
    Eigen::VectorXd g = prob.constraints(x);
    const auto m = g.size();
    if (!std::isfinite(f) || !g.allFinite())
        throw Error("sqp: objective or constraints not finite at the start point");

    Eigen::VectorXd grad = detail::fd_gradient(prob.objective, x, opts.fd_rel_step);
    Eigen::MatrixXd jac = detail::fd_jacobian(prob.constraints, x, m, opts.fd_rel_step);

    Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(n, n);
    double penalty = 1.0;

    SqpResult best;
    best.x = x;
    best.objective = f;
    best.constraint_values = g;
    best.multipliers = Eigen::VectorXd::Zero(m);
    best.lower_multipliers = Eigen::VectorXd::Zero(n);
    best.upper_multipliers = Eigen::VectorXd::Zero(n);

    const auto viol_sum = [](const Eigen::VectorXd& gv) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < gv.size(); ++i) acc += std::max(0.0, gv(i));
        return acc;
    };
    const auto viol_max = [](const Eigen::VectorXd& gv) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < gv.size(); ++i) worst = std::max(worst, gv(i));
        return worst;
    };
    const auto keep_best = [&](const SqpResult& cand) {
        const double cand_viol = viol_max(cand.constraint_values);
        const double best_viol = viol_max(best.constraint_values);
        const bool cand_ok = cand_viol <= opts.tol_feasibility;
        const bool best_ok = best_viol <= opts.tol_feasibility;
        if ((cand_ok && !best_ok) || (cand_ok == best_ok && cand_ok && cand.objective < best.objective) ||
            (!cand_ok && !best_ok && cand_viol < best_viol))
            best = cand;
    };

    bool hessian_was_reset = false;

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        // QP rows: nonlinear constraints, then upper box, then lower box.
        Eigen::MatrixXd A(m + 2 * n, n);
        Eigen::VectorXd b(m + 2 * n);
        A.topRows(m) = jac;
        b.head(m) = -g;
        A.middleRows(m, n) = Eigen::MatrixXd::Identity(n, n);
        b.segment(m, n) = prob.upper - x;
        A.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
        b.tail(n) = x - prob.lower;

        QpResult qp = solve_qp(hess, grad, A, b);
        if (!qp.feasible) {
            // Elastic relaxation: min model + w*t + sigma/2 t^2 with
            // g_lin - t <= 0, t >= 0. Always feasible for large t.
            const double w = 10.0 * (penalty + 1.0);
            Eigen::MatrixXd Ge(n + 1, n + 1);
            Ge.setZero();
            Ge.topLeftCorner(n, n) = hess;
            Ge(n, n) = 1e-4;
            Eigen::VectorXd ge(n + 1);
            ge << grad, w;
            Eigen::MatrixXd Ae(m + 2 * n + 1, n + 1);
            Ae.setZero();
            Ae.topLeftCorner(m, n) = jac;
            Ae.block(0, n, m, 1).setConstant(-1.0);
            Ae.block(m, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
            Ae.block(m + n, 0, n, n) = -Eigen::MatrixXd::Identity(n, n);
            Ae(m + 2 * n, n) = -1.0;
            Eigen::VectorXd be(m + 2 * n + 1);
            be << b, 0.0;
            const QpResult relaxed = solve_qp(Ge, ge, Ae, be);
            if (!relaxed.feasible) throw Error("sqp: elastic subproblem infeasible");
            qp.x = relaxed.x.head(n);
            qp.multipliers = relaxed.multipliers.head(m + 2 * n);
        }

        const Eigen::VectorXd p = qp.x;
        const Eigen::VectorXd mu = qp.multipliers.head(m);
        const Eigen::VectorXd mu_up = qp.multipliers.segment(m, n);
        const Eigen::VectorXd mu_lo = qp.multipliers.tail(n);

        const double feas = viol_max(g);
        const double stat_abs = (grad + jac.transpose() * mu + mu_up - mu_lo)
                                    .lpNorm<Eigen::Infinity>();
        const double stat = stat_abs / std::max(1.0, grad.lpNorm<Eigen::Infinity>());

        SqpResult cur;
        cur.x = x;
        cur.objective = f;
        cur.constraint_values = g;
        cur.multipliers = mu;
        cur.lower_multipliers = mu_lo;
        cur.upper_multipliers = mu_up;
        cur.stationarity = stat;
        cur.feasibility = feas;
        cur.iterations = iter;
        keep_best(cur);

        const bool step_vanished = p.lpNorm<Eigen::Infinity>() <=
                                   1e-12 * std::max(1.0, x.lpNorm<Eigen::Infinity>());
        if (feas <= opts.tol_feasibility && (stat <= opts.tol_stationarity || step_vanished)) {
            cur.converged = true;
            return cur;
        }

        // Keep the l1 penalty above the multiplier scale so the merit function
        // is exact.
        const double mu_scale = (m > 0) ? mu.lpNorm<Eigen::Infinity>() : 0.0;
        penalty = std::max(penalty, 1.5 * mu_scale + 0.1);

        const double merit0 = f + penalty * viol_sum(g);
        const double descent = grad.dot(p) - penalty * viol_sum(g);
        if (descent >= -1e-16) {
            if (!hessian_was_reset) {
                // A stale quasi-Newton model can destroy descent; restart it.
                hess = Eigen::MatrixXd::Identity(n, n);
                hessian_was_reset = true;
                continue;
            }
            best.iterations = iter;
            return best;  // stalled; best iterate, converged=false
        }
        hessian_was_reset = false;

        double alpha = 1.0;
        double f_new = f;
        Eigen::VectorXd g_new = g, x_new = x;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            x_new = x + alpha * p;
            f_new = prob.objective(x_new);
            g_new = prob.constraints(x_new);
            const bool finite = std::isfinite(f_new) && g_new.allFinite();
            if (finite && f_new + penalty * viol_sum(g_new) <= merit0 + 1e-4 * alpha * descent) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            best.iterations = iter;
            return best;  // merit cannot be reduced along p; report best so far
        }

        const Eigen::VectorXd grad_new = detail::fd_gradient(prob.objective, x_new, opts.fd_rel_step);
        const Eigen::MatrixXd jac_new = detail::fd_jacobian(prob.constraints, x_new, m, opts.fd_rel_step);

        // Damped BFGS (Powell) on the Lagrangian gradient change.
        const Eigen::VectorXd s = x_new - x;
        Eigen::VectorXd y = (grad_new + jac_new.transpose() * mu) - (grad + jac.transpose() * mu);
        const double sBs = s.dot(hess * s);
        const double sy = s.dot(y);
        if (sBs > 1e-16) {
            if (sy < 0.2 * sBs) {
                const double theta = 0.8 * sBs / (sBs - sy);
                y = theta * y + (1.0 - theta) * (hess * s);
            }
            const double sy_damped = s.dot(y);
            if (sy_damped > 1e-16) {
                const Eigen::VectorXd Bs = hess * s;
                hess -= (Bs * Bs.transpose()) / sBs;
                hess += (y * y.transpose()) / sy_damped;
            }
        }

        x = x_new;
        f = f_new;
        g = g_new;
        grad = grad_new;
        jac = jac_new;
    }

    best.iterations = opts.max_iterations;
    return best;
}

}  // namespace kitepath::opt
