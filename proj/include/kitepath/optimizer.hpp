#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kitepath/config.hpp"
#include "kitepath/errors.hpp"
#include "kitepath/geometry.hpp"
#include "kitepath/model.hpp"
#include "kitepath/sqp.hpp"
#include "kitepath/types.hpp"

namespace kitepath::optimizer {

using geometry::kPi;

/// Decision vector layout used throughout this module: {beta0, dbeta, dphi}.
using DesignVector = std::array<double, 3>;

struct BetaLimits {
    double beta_min;  // rad, lowest admissible elevation anywhere on the path
    double beta_max;  // rad, highest admissible elevation
};

struct PlanProblem {
    double r = 100.0;  // m
    int n_beta = 1;    // 1 ellipse, 2 figure-of-eight
    int n_phi = 1;
    double kappa_max = 0.0;  // 1/m, geodesic curvature ceiling from the roll limit
    double beta_min = 0.0;   // rad
    double beta_max = kPi / 2.0;
    DesignVector lower = {0.0, 0.0, 0.0};
    DesignVector upper = {kPi / 2.0, kPi / 4.0, kPi / 2.0};
    int grid_n = 360;
    Environment env;
    KiteParams kite;
    std::optional<double> f_tether_max;  // N
    std::optional<double> p_rated;       // W
};

struct PlanSolution {
    LissajousPath path;
    double p_avg = 0.0;      // W, cycle-averaged mechanical power
    double loyd_ratio = 0.0;
    double max_kappa_on_grid = 0.0;  // 1/m
    std::vector<std::string> active_constraints;  // sorted labels
    int iterations = 0;
    bool converged = false;
    bool seed_feasible = false;  // whether the supplied start point satisfied all constraints
    double feasibility = 0.0;    // max constraint violation at the returned point
    double stationarity = 0.0;   // scaled first-order optimality residual
};

struct Evaluation {
    double p_avg = 0.0;  // W
    std::vector<double> constraints;  // g <= 0 feasible; see evaluate() for row order
};

/// Geodesic curvature ceiling implied by a roll limit. Flying curvature kappa
/// needs bank arcsin(m kappa / (rho A c_L / 2)); airspeed cancels between the
/// turning lift and the centripetal demand, so no velocity appears here.
inline double kappa_limit(double phi_max, const KiteParams& kite, const Environment& env) {
    if (!(phi_max > 0.0) || !(phi_max < kPi / 2.0))
        throw ValidationError("phi_max", "must be in (0, pi/2)");
    validate(kite);
    validate(env);
    return env.air_density * kite.area * kite.c_lift * std::sin(phi_max) / (2.0 * kite.mass);
}

/// Elevation band reachable on a sphere of radius r given altitude limits.
/// The path's lowest point sits at altitude r sin(beta0 - dbeta), so these
/// bounds apply to beta0 -+ dbeta, not to beta0 itself.
inline BetaLimits beta_limits(double r, double h_min, double h_max) {
    if (!(r > 0.0)) throw InvalidRadius("radius must be positive, got " + std::to_string(r));
    if (!(h_min > 0.0)) throw ValidationError("h_min", "must be positive");
    if (!(h_max > h_min)) throw ValidationError("h_max", "must exceed h_min");
    if (h_min >= r)
        throw NoFeasibleElevation("altitude floor " + std::to_string(h_min) +
                                  " m is unreachable on a tether of " + std::to_string(r) + " m");
    return {std::asin(h_min / r), std::asin(std::min(h_max / r, 1.0))};
}

inline PlanProblem build_problem(double r, const RunConfig& cfg) {
    cli::validate(cfg);
    PlanProblem problem;
    problem.r = r;
    problem.n_beta = cfg.shape_n_beta();
    problem.n_phi = cfg.shape_n_phi();
    problem.grid_n = cfg.grid_n;
    problem.env = cfg.environment;
    problem.kite = cfg.kite;
    problem.kappa_max =
        kappa_limit(cfg.constraints.phi_max_deg * kPi / 180.0, cfg.kite, cfg.environment);
    const BetaLimits limits = beta_limits(r, cfg.constraints.h_min, cfg.constraints.h_max);
    problem.beta_min = limits.beta_min;
    problem.beta_max = limits.beta_max;

    const double deg = kPi / 180.0;
    problem.lower = {limits.beta_min, cfg.bounds.dbeta_min_deg * deg, cfg.bounds.dphi_min_deg * deg};
    problem.upper = {std::min(kPi / 2.0, cfg.bounds.beta0_max_deg * deg),
                     cfg.bounds.dbeta_max_deg * deg, cfg.bounds.dphi_max_deg * deg};
    if (problem.lower[0] + problem.lower[1] > problem.beta_max)
        throw InconsistentBounds(
            "smallest admissible path (beta0 at the floor, minimum beta range) already "
            "exceeds the elevation ceiling");

    problem.f_tether_max = cfg.constraints.f_tether_max;
    problem.p_rated = cfg.constraints.p_rated;
    return problem;
}

namespace detail {

inline LissajousPath make_path(const PlanProblem& problem, const DesignVector& x) {
    LissajousPath path;
    path.beta0 = x[0];
    path.dbeta = x[1];
    path.dphi = x[2];
    path.n_beta = problem.n_beta;
    path.n_phi = problem.n_phi;
    return path;
}

/// Samples the path without the LissajousPath validity checks: the solver
/// probes points slightly outside the box during finite differencing and line
/// search, and those probes must still evaluate.
inline std::vector<PathSample> sample_unchecked(const PlanProblem& problem,
                                                const DesignVector& x) {
    LissajousPath path = make_path(problem, x);
    std::vector<PathSample> samples(static_cast<std::size_t>(problem.grid_n));
    for (int i = 0; i < problem.grid_n; ++i) {
        const double s = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(problem.grid_n);
        PathSample& out = samples[static_cast<std::size_t>(i)];
        const geometry::PathAngles angles = geometry::eval_path(path, s);
        const geometry::PathDerivs derivs = geometry::path_derivatives(path, s);
        const geometry::Curvatures curv = geometry::curvature(path, s, problem.r);
        out.s = s;
        out.beta = angles.beta;
        out.phi_az = angles.phi_az;
        out.dbeta_ds = derivs.dbeta_ds;
        out.dphi_ds = derivs.dphi_ds;
        out.d2beta_ds2 = derivs.d2beta_ds2;
        out.d2phi_ds2 = derivs.d2phi_ds2;
        out.chi = geometry::heading(path, s);
        out.kappa_total = curv.kappa_total;
        out.kappa_geo = curv.kappa_geo;
    }
    return samples;
}

/// Tether force at the pointwise-optimal reel-out factor, computed in closed
/// form so it stays finite for any probe point (no throw on radial overrun).
inline double force_at_optimum(const PathSample& sample, const PlanProblem& problem) {
    const double roll =
        model::roll_angle(sample.kappa_geo, problem.kite, problem.env, model::RollHandling::clamp);
    const double c_r = model::resultant_coeff(problem.kite, roll);
    const double glide = problem.kite.c_lift * std::cos(roll) / problem.kite.c_drag;
    const double b = std::cos(sample.beta) * std::cos(sample.phi_az);
    const double q = 0.5 * problem.env.air_density * problem.env.wind_speed * problem.env.wind_speed;
    const double rel = 2.0 * b / 3.0;  // b - f at f = b/3
    return q * problem.kite.area * c_r * (1.0 + glide * glide) * rel * rel;
}

/// Inequality rows handed to the solver. Row order:
/// [grid_n curvature rows] [elevation ceiling] [elevation floor]
/// [grid_n force rows if capped] [grid_n power rows if capped].
/// Force and power are imposed per sample (smooth rows, unlike a pointwise
/// max) and scaled by the cap so tolerances are relative for large limits.
inline std::vector<double> solver_rows(const PlanProblem& problem, const DesignVector& x,
                                       const std::vector<PathSample>& samples) {
    std::vector<double> g;
    g.reserve(samples.size() * (1 + (problem.f_tether_max ? 1 : 0) + (problem.p_rated ? 1 : 0)) + 2);
    for (const PathSample& sample : samples) g.push_back(sample.kappa_geo - problem.kappa_max);
    g.push_back(x[0] + x[1] - problem.beta_max);
    g.push_back(problem.beta_min - (x[0] - x[1]));
    if (problem.f_tether_max) {
        const double cap = *problem.f_tether_max;
        const double scale = std::max(1.0, cap);
        for (const PathSample& sample : samples)
            g.push_back((force_at_optimum(sample, problem) - cap) / scale);
    }
    if (problem.p_rated) {
        const double cap = *problem.p_rated;
        const double scale = std::max(1.0, cap);
        for (const PathSample& sample : samples) {
            const double force = force_at_optimum(sample, problem);
            const double reel = model::reel_out_optimum(sample.beta, sample.phi_az);
            g.push_back((force * reel * problem.env.wind_speed - cap) / scale);
        }
    }
    return g;
}

/// Inequality rows reported by evaluate(). Same leading rows as solver_rows,
/// but the optional caps collapse to one worst-sample row each, in N and W.
inline std::vector<double> report_rows(const PlanProblem& problem, const DesignVector& x,
                                       const std::vector<PathSample>& samples) {
    std::vector<double> g;
    g.reserve(samples.size() + 4);
    for (const PathSample& sample : samples) g.push_back(sample.kappa_geo - problem.kappa_max);
    g.push_back(x[0] + x[1] - problem.beta_max);
    g.push_back(problem.beta_min - (x[0] - x[1]));
    if (problem.f_tether_max || problem.p_rated) {
        double worst_force = -std::numeric_limits<double>::infinity();
        double worst_power = -std::numeric_limits<double>::infinity();
        for (const PathSample& sample : samples) {
            const double force = force_at_optimum(sample, problem);
            worst_force = std::max(worst_force, force);
            worst_power = std::max(
                worst_power,
                force * model::reel_out_optimum(sample.beta, sample.phi_az) * problem.env.wind_speed);
        }
        if (problem.f_tether_max) g.push_back(worst_force - *problem.f_tether_max);
        if (problem.p_rated) g.push_back(worst_power - *problem.p_rated);
    }
    return g;
}

inline void check_problem(const PlanProblem& problem) {
    if (!(problem.r > 0.0))
        throw InvalidRadius("radius must be positive, got " + std::to_string(problem.r));
    if (!(problem.kappa_max > 0.0))
        throw ValidationError("kappa_max", "must be positive");
    if (problem.grid_n < 8) throw ValidationError("grid_n", "must be at least 8");
    if (!(problem.beta_min >= 0.0 && problem.beta_min < problem.beta_max))
        throw ValidationError("beta_min", "need 0 <= beta_min < beta_max");
    for (int i = 0; i < 3; ++i)
        if (!(problem.lower[i] <= problem.upper[i]))
            throw InconsistentBounds("lower bound exceeds upper bound for variable " +
                                     std::to_string(i));
    if (!(problem.lower[1] > 0.0) || !(problem.lower[2] > 0.0))
        throw ValidationError("lower", "range bounds must be positive");
    validate(problem.kite);
    validate(problem.env);
}

inline const char* variable_name(int i) {
    return i == 0 ? "beta0" : (i == 1 ? "dbeta" : "dphi");
}

}  // namespace detail

/// Average power and constraint values at a design point. The power average
/// uses clamped roll so the objective stays defined on infeasible probes; at
/// any curvature-feasible point the clamp never engages and the value equals
/// the strict model.
inline Evaluation evaluate(const PlanProblem& problem, const DesignVector& x) {
    detail::check_problem(problem);
    for (double v : x)
        if (!std::isfinite(v)) throw ValidationError("x", "design vector must be finite");
    const std::vector<PathSample> samples = detail::sample_unchecked(problem, x);
    Evaluation result;
    result.p_avg =
        model::average_power(samples, problem.env, problem.kite, model::RollHandling::clamp);
    result.constraints = detail::report_rows(problem, x, samples);
    return result;
}

/// Largest constraint violation on a grid `factor` times finer than the
/// problem's own. Used to check that grid-sampled constraints hold between
/// the optimization nodes.
inline double max_violation_on_refined_grid(const PlanProblem& problem, const DesignVector& x,
                                            int factor = 10) {
    if (factor < 1) throw ValidationError("factor", "must be at least 1");
    PlanProblem fine = problem;
    fine.grid_n = problem.grid_n * factor;
    const std::vector<PathSample> samples = detail::sample_unchecked(fine, x);
    double worst = -std::numeric_limits<double>::infinity();
    for (double gi : detail::solver_rows(fine, x, samples)) worst = std::max(worst, gi);
    return worst;
}

/// Local solve from a single start point. The start is clamped into the box;
/// hitting the iteration cap reports converged = false rather than throwing.
inline PlanSolution solve(const PlanProblem& problem, const DesignVector& x0) {
    detail::check_problem(problem);
    for (double v : x0)
        if (!std::isfinite(v)) throw ValidationError("x0", "start point must be finite");

    const double p_loyd = model::loyd_power(problem.env, problem.kite);

    opt::NlpProblem nlp;
    nlp.lower = Eigen::Vector3d(problem.lower[0], problem.lower[1], problem.lower[2]);
    nlp.upper = Eigen::Vector3d(problem.upper[0], problem.upper[1], problem.upper[2]);
    // Normalizing by the Loyd limit keeps the objective O(1) so the solver's
    // absolute tolerances mean the same thing at every radius and wind speed.
    nlp.objective = [&problem, p_loyd](const Eigen::VectorXd& v) {
        const DesignVector x = {v[0], v[1], v[2]};
        const std::vector<PathSample> samples = detail::sample_unchecked(problem, x);
        return -model::average_power(samples, problem.env, problem.kite,
                                     model::RollHandling::clamp) /
               p_loyd;
    };
    nlp.constraints = [&problem](const Eigen::VectorXd& v) {
        const DesignVector x = {v[0], v[1], v[2]};
        const std::vector<PathSample> samples = detail::sample_unchecked(problem, x);
        const std::vector<double> rows = detail::solver_rows(problem, x, samples);
        return Eigen::Map<const Eigen::VectorXd>(rows.data(),
                                                 static_cast<Eigen::Index>(rows.size()))
            .eval();
    };

    DesignVector start = x0;
    for (int i = 0; i < 3; ++i) start[i] = std::clamp(start[i], problem.lower[i], problem.upper[i]);

    double seed_violation = 0.0;
    {
        const Eigen::VectorXd g0 =
            nlp.constraints(Eigen::Vector3d(start[0], start[1], start[2]));
        for (Eigen::Index i = 0; i < g0.size(); ++i)
            seed_violation = std::max(seed_violation, g0[i]);
    }

    opt::SqpOptions options;
    const opt::SqpResult res =
        opt::solve_sqp(nlp, Eigen::Vector3d(start[0], start[1], start[2]), options);

    PlanSolution solution;
    solution.path = detail::make_path(problem, {res.x[0], res.x[1], res.x[2]});
    const std::vector<PathSample> samples =
        detail::sample_unchecked(problem, {res.x[0], res.x[1], res.x[2]});
    solution.p_avg =
        model::average_power(samples, problem.env, problem.kite, model::RollHandling::clamp);
    solution.loyd_ratio = solution.p_avg / p_loyd;
    solution.max_kappa_on_grid = 0.0;
    for (const PathSample& sample : samples)
        solution.max_kappa_on_grid = std::max(solution.max_kappa_on_grid, sample.kappa_geo);
    solution.iterations = res.iterations;
    solution.converged = res.converged;
    solution.seed_feasible = seed_violation <= 1e-6;
    solution.feasibility = res.feasibility;
    solution.stationarity = res.stationarity;

    // Activity is decided from constraint residuals, not multipliers: a
    // weakly-active row with a zero multiplier is still operationally binding.
    const double tol = 1e-5;
    std::vector<std::string> labels;
    const Eigen::VectorXd& g = res.constraint_values;
    const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
    bool curvature_active = false;
    for (Eigen::Index i = 0; i < n; ++i) curvature_active = curvature_active || (g[i] >= -tol);
    if (curvature_active) labels.push_back("curvature");
    if (g[n] >= -tol) labels.push_back("max_elevation");
    if (g[n + 1] >= -tol) labels.push_back("min_elevation");
    Eigen::Index row = n + 2;
    if (problem.f_tether_max) {
        bool active = false;
        for (Eigen::Index i = 0; i < n; ++i) active = active || (g[row + i] >= -tol);
        if (active) labels.push_back("tether_force");
        row += n;
    }
    if (problem.p_rated) {
        bool active = false;
        for (Eigen::Index i = 0; i < n; ++i) active = active || (g[row + i] >= -tol);
        if (active) labels.push_back("rated_power");
    }
    for (int i = 0; i < 3; ++i) {
        if (res.x[i] - problem.lower[i] <= tol)
            labels.push_back(std::string("bound:") + detail::variable_name(i) + ":lo");
        if (problem.upper[i] - res.x[i] <= tol)
            labels.push_back(std::string("bound:") + detail::variable_name(i) + ":hi");
    }
    std::sort(labels.begin(), labels.end());
    solution.active_constraints = std::move(labels);
    return solution;
}

/// Deterministic coarse-grid start points, best objective first. Candidates
/// violating any constraint are dropped; if nothing on the grid is feasible
/// the single least-violating candidate is returned so a solve can still be
/// attempted.
inline std::vector<DesignVector> grid_seeds(const PlanProblem& problem, std::size_t count = 5) {
    detail::check_problem(problem);
    if (count == 0) throw ValidationError("count", "must be positive");

    const auto level = [](double lo, double hi, int i, int n) {
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    struct Candidate {
        DesignVector x;
        double p_avg;
        double violation;
    };
    std::vector<Candidate> feasible;
    Candidate fallback{{0, 0, 0}, 0.0, std::numeric_limits<double>::infinity()};
    for (int ib = 0; ib < 6; ++ib) {
        for (int id = 0; id < 5; ++id) {
            for (int ip = 0; ip < 6; ++ip) {
                DesignVector x = {level(problem.lower[0], problem.upper[0], ib, 6),
                                  level(problem.lower[1], problem.upper[1], id, 5),
                                  level(problem.lower[2], problem.upper[2], ip, 6)};
                // Elevation rows are linear in x: reject before the expensive
                // curvature sampling. Rejected candidates still compete for
                // the fallback slot so a narrow elevation band (feasible, but
                // missed by every grid level) leaves the solver a start point
                // to restore from.
                const double lin_violation = std::max(x[0] + x[1] - problem.beta_max,
                                                      problem.beta_min - (x[0] - x[1]));
                if (lin_violation > 0.0) {
                    if (lin_violation < fallback.violation) fallback = {x, 0.0, lin_violation};
                    continue;
                }
                const std::vector<PathSample> samples = detail::sample_unchecked(problem, x);
                const double p_avg = model::average_power(samples, problem.env, problem.kite,
                                                          model::RollHandling::clamp);
                double violation = 0.0;
                for (double gi : detail::solver_rows(problem, x, samples))
                    violation = std::max(violation, gi);
                if (violation <= 1e-9) {
                    feasible.push_back({x, p_avg, violation});
                } else if (violation < fallback.violation) {
                    fallback = {x, p_avg, violation};
                }
            }
        }
    }
    std::stable_sort(feasible.begin(), feasible.end(),
                     [](const Candidate& a, const Candidate& b) { return a.p_avg > b.p_avg; });
    std::vector<DesignVector> seeds;
    for (const Candidate& c : feasible) {
        if (seeds.size() >= count) break;
        seeds.push_back(c.x);
    }
    if (seeds.empty() && std::isfinite(fallback.violation)) seeds.push_back(fallback.x);
    if (seeds.empty())
        throw NoFeasibleElevation("no start point on the seeding grid satisfies the elevation band");
    return seeds;
}

/// Best converged local solution across the given starts.
inline PlanSolution multi_start(const PlanProblem& problem, const std::vector<DesignVector>& seeds) {
    if (seeds.empty()) throw ValidationError("seeds", "need at least one start point");
    std::optional<PlanSolution> best;
    for (const DesignVector& seed : seeds) {
        PlanSolution candidate = solve(problem, seed);
        if (!candidate.converged) continue;
        if (!best || candidate.p_avg > best->p_avg) best = std::move(candidate);
    }
    if (!best)
        throw NoConvergedSolution("none of " + std::to_string(seeds.size()) +
                                  " start points produced a converged solution");
    return *best;
}

inline PlanSolution multi_start(const PlanProblem& problem) {
    return multi_start(problem, grid_seeds(problem));
}

}  // namespace kitepath::optimizer
