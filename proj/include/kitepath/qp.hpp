#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "kitepath/errors.hpp"

namespace kitepath::opt {

/// Result of a convex QP solve.
struct QpResult {
    Eigen::VectorXd x;
    Eigen::VectorXd multipliers;  // one per constraint row, nonnegative
    bool feasible = true;         // false when the constraints are inconsistent
    int iterations = 0;
};

/// Solves  min 1/2 x'Gx + g'x  subject to  A x <= b  with G symmetric positive
/// definite, by the Goldfarb-Idnani dual active-set method: start at the
/// unconstrained minimizer and add violated constraints one at a time, each
/// addition being a dual-feasible step, so no feasible starting point is
/// needed. Intended for small dense problems (n of a few, m up to a few
/// thousand); the working-set solves use a bordered KKT factorization
/// recomputed per step, which is cheap at these sizes.
inline QpResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& g,
                         const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const auto n = G.rows();
    const auto m = A.rows();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    constexpr double kViolTol = 1e-10;   // constraint violation considered real
    constexpr double kZeroStep = 1e-13;  // curvature along z considered zero

    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success)
        throw Error("qp: Hessian is not positive definite");

    QpResult res;
    res.x = llt.solve(-g);
    res.multipliers = Eigen::VectorXd::Zero(m);
    if (m == 0) return res;

    std::vector<int> active;          // rows currently in the working set
    Eigen::VectorXd u(0);             // their multipliers, kept aligned

    // Safety cap; Goldfarb-Idnani terminates finitely, so hitting this means
    // a numerical breakdown worth surfacing.
    const int max_steps = static_cast<int>(10 * m + 100);

    for (int step = 0; step < max_steps; ++step) {
        ++res.iterations;

        // Most violated inactive constraint.
        int p = -1;
        double worst = kViolTol;
        for (int i = 0; i < m; ++i) {
            const double viol = A.row(i).dot(res.x) - b(i);
            if (viol > worst) {
                bool in_set = false;
                for (int j : active) in_set = in_set || (j == i);
                if (!in_set) {
                    worst = viol;
                    p = i;
                }
            }
        }
        if (p < 0) {
            for (size_t j = 0; j < active.size(); ++j)
                res.multipliers(active[j]) = u(static_cast<Eigen::Index>(j));
            return res;
        }

        const Eigen::VectorXd n_plus = -A.row(p).transpose();
        double u_plus = 0.0;

        // Bring constraint p into the working set, dropping blockers as needed.
        while (true) {
            const auto k = static_cast<Eigen::Index>(active.size());

            // Bordered KKT solve: z is the primal direction in the null space
            // of the active normals, r the induced multiplier change.
            Eigen::VectorXd z(n), r(k);
            if (k == 0) {
                z = llt.solve(n_plus);
            } else {
                Eigen::MatrixXd N(n, k);
                for (Eigen::Index j = 0; j < k; ++j)
                    N.col(j) = -A.row(active[static_cast<size_t>(j)]).transpose();
                Eigen::MatrixXd kkt(n + k, n + k);
                kkt.setZero();
                kkt.topLeftCorner(n, n) = G;
                kkt.topRightCorner(n, k) = N;
                kkt.bottomLeftCorner(k, n) = N.transpose();
                Eigen::VectorXd rhs(n + k);
                rhs.head(n) = n_plus;
                rhs.tail(k).setZero();
                const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
                z = sol.head(n);
                r = sol.tail(k);
            }

            // Largest dual step before an active multiplier hits zero.
            double t1 = kInf;
            int blocking = -1;
            for (Eigen::Index j = 0; j < k; ++j) {
                if (r(j) > 1e-12) {
                    const double t = u(j) / r(j);
                    if (t < t1) {
                        t1 = t;
                        blocking = static_cast<int>(j);
                    }
                }
            }

            const double ztn = n_plus.dot(z);
            if (ztn <= kZeroStep) {
                // No primal progress possible along this constraint's normal.
                if (blocking < 0) {
                    res.feasible = false;
                    for (size_t j = 0; j < active.size(); ++j)
                        res.multipliers(active[j]) = u(static_cast<Eigen::Index>(j));
                    return res;
                }
                u -= t1 * r;
                u_plus += t1;
                active.erase(active.begin() + blocking);
                Eigen::VectorXd u2(u.size() - 1);
                u2 << u.head(blocking), u.tail(u.size() - blocking - 1);
                u = u2;
                continue;
            }

            const double viol = b(p) - A.row(p).dot(res.x);  // <= 0 while violated
            const double t2 = -viol / ztn;
            const double t = std::min(t1, t2);

            res.x += t * z;
            if (k > 0) u -= t * r;
            u_plus += t;

            if (t2 <= t1) {
                active.push_back(p);
                Eigen::VectorXd u2(u.size() + 1);
                u2 << u, u_plus;
                u = u2;
                break;
            }
            active.erase(active.begin() + blocking);
            Eigen::VectorXd u2(u.size() - 1);
            u2 << u.head(blocking), u.tail(u.size() - blocking - 1);
            u = u2;
        }
    }
    throw Error("qp: iteration cap exceeded (numerical breakdown)");
}

}  // namespace kitepath::opt
