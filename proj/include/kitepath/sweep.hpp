#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kitepath/config.hpp"
#include "kitepath/errors.hpp"
#include "kitepath/geometry.hpp"
#include "kitepath/model.hpp"
#include "kitepath/optimizer.hpp"
#include "kitepath/spline.hpp"
#include "kitepath/types.hpp"

namespace kitepath::sweep {

struct SweepResult {
    std::vector<double> grid;  // tether lengths, strictly increasing
    std::vector<optimizer::PlanSolution> solutions;  // one per grid point, all converged
    int n_beta = 1;
    int n_phi = 1;
};

/// Raised when a sweep cannot complete; carries whatever finished before the
/// failing tether length so partial results can still be reported.
class SweepAborted : public Error {
  public:
    SweepAborted(double r_failed, SweepResult partial, const std::string& reason)
        : Error("sweep aborted at r = " + std::to_string(r_failed) + " m: " + reason),
          r_failed_(r_failed),
          partial_(std::move(partial)) {}

    double r_failed() const { return r_failed_; }
    const SweepResult& partial() const { return partial_; }

  private:
    double r_failed_;
    SweepResult partial_;
};

/// Cubic interpolants of the three optimal path parameters over tether length,
/// plus everything needed to rebuild a path at an intermediate r.
struct ParamSplines {
    CubicSpline beta0;
    CubicSpline dbeta;
    CubicSpline dphi;
    double r_min = 0.0;
    double r_max = 0.0;
    int n_beta = 1;
    int n_phi = 1;

    LissajousPath path_at(double r) const {
        LissajousPath path;
        path.beta0 = beta0(r);
        path.dbeta = dbeta(r);
        path.dphi = dphi(r);
        path.n_beta = n_beta;
        path.n_phi = n_phi;
        return path;
    }
};

/// Solves the planning problem on the grid r_min, r_min+dr, ... The first
/// point is seeded by the deterministic grid search; every later point warm
/// starts from its predecessor and falls back to multi-start before giving up.
inline SweepResult run_sweep(const RunConfig& cfg, double r_min, double r_max, double dr) {
    cli::validate(cfg);
    if (!(r_min > 0.0)) throw ValidationError("r_min", "must be positive");
    if (!(r_max >= r_min)) throw ValidationError("r_max", "must be >= r_min");
    if (!(dr > 0.0)) throw ValidationError("dr", "must be positive");

    // Integer-count grid: accumulating r += dr would drift and could drop the
    // final point to rounding.
    const int count = static_cast<int>(std::floor((r_max - r_min) / dr + 1e-9)) + 1;

    SweepResult result;
    result.n_beta = cfg.shape_n_beta();
    result.n_phi = cfg.shape_n_phi();
    result.grid.reserve(static_cast<std::size_t>(count));
    result.solutions.reserve(static_cast<std::size_t>(count));

    for (int i = 0; i < count; ++i) {
        const double r = r_min + dr * static_cast<double>(i);
        if (i == 0) {
            // Preconditions of the first problem are the caller's contract;
            // let its errors surface unwrapped.
            const optimizer::PlanProblem problem = optimizer::build_problem(r, cfg);
            optimizer::PlanSolution sol = [&] {
                try {
                    return optimizer::multi_start(problem);
                } catch (const NoConvergedSolution& e) {
                    throw SweepAborted(r, SweepResult{{}, {}, result.n_beta, result.n_phi},
                                       e.what());
                }
            }();
            result.grid.push_back(r);
            result.solutions.push_back(std::move(sol));
            continue;
        }
        try {
            const optimizer::PlanProblem problem = optimizer::build_problem(r, cfg);
            const optimizer::PlanSolution& prev = result.solutions.back();
            optimizer::PlanSolution sol = optimizer::solve(
                problem, {prev.path.beta0, prev.path.dbeta, prev.path.dphi});
            if (!sol.converged) sol = optimizer::multi_start(problem);
            result.grid.push_back(r);
            result.solutions.push_back(std::move(sol));
        } catch (const NoConvergedSolution& e) {
            throw SweepAborted(r, std::move(result), e.what());
        } catch (const InconsistentBounds& e) {
            throw SweepAborted(r, std::move(result), e.what());
        } catch (const NoFeasibleElevation& e) {
            throw SweepAborted(r, std::move(result), e.what());
        }
    }
    return result;
}

inline SweepResult run_sweep(const RunConfig& cfg) {
    return run_sweep(cfg, cfg.sweep.r_min, cfg.sweep.r_max, cfg.sweep.dr);
}

/// Natural cubic splines through the per-parameter knot sequences of a sweep.
inline ParamSplines fit_splines(const SweepResult& sweep) {
    if (sweep.grid.size() < 4)
        throw TooFewKnots("spline fit needs at least 4 sweep points, got " +
                          std::to_string(sweep.grid.size()));
    if (sweep.solutions.size() != sweep.grid.size())
        throw ValidationError("sweep", "one solution per grid point required");

    std::vector<double> beta0, dbeta, dphi;
    beta0.reserve(sweep.grid.size());
    dbeta.reserve(sweep.grid.size());
    dphi.reserve(sweep.grid.size());
    for (const optimizer::PlanSolution& sol : sweep.solutions) {
        beta0.push_back(sol.path.beta0);
        dbeta.push_back(sol.path.dbeta);
        dphi.push_back(sol.path.dphi);
    }

    ParamSplines splines;
    splines.beta0 = CubicSpline(sweep.grid, beta0);
    splines.dbeta = CubicSpline(sweep.grid, dbeta);
    splines.dphi = CubicSpline(sweep.grid, dphi);
    splines.r_min = sweep.grid.front();
    splines.r_max = sweep.grid.back();
    splines.n_beta = sweep.n_beta;
    splines.n_phi = sweep.n_phi;
    return splines;
}

/// Cycle-average power flown on the spline-interpolated path at tether length
/// r. Interpolated parameters can overshoot the curvature cap between knots by
/// a hair, so the roll conversion clamps instead of throwing.
inline double power_at(const ParamSplines& splines, double r, const Environment& env,
                       const KiteParams& kite, int grid_n = 360) {
    const std::vector<PathSample> samples = geometry::sample_path(splines.path_at(r), r, grid_n);
    return model::average_power(samples, env, kite, model::RollHandling::clamp);
}

/// Phase-averaged power over a tether-length interval: the mean over r of the
/// per-cycle average power, by trapezoidal quadrature on n_r points. A
/// zero-width interval degenerates to the single-point value.
inline double phase_average(const ParamSplines& splines, double r_lo, double r_hi,
                            const Environment& env, const KiteParams& kite, int n_r = 201,
                            int grid_n = 360) {
    if (!(r_lo <= r_hi)) throw ValidationError("r_lo", "interval must have r_lo <= r_hi");
    const double span = splines.r_max - splines.r_min;
    const double tol = 1e-9 * span;
    if (r_lo < splines.r_min - tol || r_hi > splines.r_max + tol)
        throw OutOfDomain("phase-average interval [" + std::to_string(r_lo) + ", " +
                          std::to_string(r_hi) + "] outside spline domain [" +
                          std::to_string(splines.r_min) + ", " + std::to_string(splines.r_max) +
                          "]");

    if (r_lo == r_hi) return power_at(splines, r_lo, env, kite, grid_n);

    if (n_r < 4) throw ValidationError("n_r", "need at least 4 quadrature points");
    const double h = (r_hi - r_lo) / static_cast<double>(n_r - 1);
    double sum = 0.0;
    for (int i = 0; i < n_r; ++i) {
        const double r = (i == n_r - 1) ? r_hi : r_lo + h * static_cast<double>(i);
        const double weight = (i == 0 || i == n_r - 1) ? 0.5 : 1.0;
        sum += weight * power_at(splines, r, env, kite, grid_n);
    }
    return sum * h / (r_hi - r_lo);
}

inline double phase_average(const SweepResult& sweep, double r_lo, double r_hi,
                            const Environment& env, const KiteParams& kite, int n_r = 201,
                            int grid_n = 360) {
    return phase_average(fit_splines(sweep), r_lo, r_hi, env, kite, n_r, grid_n);
}

}  // namespace kitepath::sweep
