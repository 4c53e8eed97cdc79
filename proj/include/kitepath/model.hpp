#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kitepath/errors.hpp"
#include "kitepath/geometry.hpp"
#include "kitepath/types.hpp"

namespace kitepath::model {

/// Theoretical maximum traction power of an ideal crosswind kite:
/// (1/2) rho A c_L v_w^3 (4/27) (c_L/c_D)^2.
inline double loyd_power(const Environment& env, const KiteParams& kite) {
    const double glide = kite.c_lift / kite.c_drag;
    const double vw3 = env.wind_speed * env.wind_speed * env.wind_speed;
    return 0.5 * env.air_density * kite.area * kite.c_lift * vw3 * (4.0 / 27.0) * glide * glide;
}

/// How excess curvature demand is treated when converting curvature to roll.
/// Optimization line searches use `clamp` so iterates outside the curvature cap
/// still produce finite objective values; everything else uses `strict`.
enum class RollHandling { strict, clamp };

/// Roll angle needed to fly a turn of geodesic curvature kappa_geo:
/// arcsin(m * kappa / (rho A c_L / 2)). The derivation equates the turning-lift
/// lateral acceleration a_l = kappa * v_a^2 * (rho A c_L / (2 m)) * sin(roll)
/// demanded by a turn radius R0 = 1/kappa, with v_k ~ v_a; the speeds cancel.
inline double roll_angle(double kappa_geo, const KiteParams& kite, const Environment& env,
                         RollHandling handling = RollHandling::strict) {
    if (!(kappa_geo >= 0.0))
        throw ValidationError("kappa_geo", "geodesic curvature must be nonnegative");
    double arg = kite.mass * kappa_geo / (0.5 * env.air_density * kite.area * kite.c_lift);
    if (arg > 1.0) {
        if (handling == RollHandling::strict)
            throw CurvatureInfeasible("required turning lift exceeds available lift: m*kappa/(rho*A*c_L/2) = " +
                                      std::to_string(arg));
        arg = 1.0;
    }
    return std::asin(arg);
}

/// Apparent wind speed from the geometric similarity of velocity and force
/// components: v_a = v_w (cos(beta) cos(phi) - f) sqrt(1 + (c_L cos(roll)/c_D)^2).
inline double apparent_speed(const KiteState& state, const Environment& env,
                             const KiteParams& kite) {
    const double radial = std::cos(state.beta) * std::cos(state.phi_az) - state.reel_factor;
    if (!(radial > 0.0))
        throw RadialOverrun("radial apparent wind is not positive: cos(beta)cos(phi) - f = " +
                            std::to_string(radial));
    const double g = kite.c_lift * std::cos(state.phi_roll) / kite.c_drag;
    return env.wind_speed * radial * std::sqrt(1.0 + g * g);
}

/// Tangential kite speed as a fraction of wind speed, from the quadratic
/// closure of the velocity triangle:
///   lambda = a + sqrt(a^2 + b^2 - 1 + (c_L cos(roll)/c_D)^2 (b - f)^2)
/// with a = -sin(beta)cos(phi)cos(chi) + sin(phi)sin(chi), b = cos(beta)cos(phi).
/// Nonnegativity of lambda bounds the reachable (beta, phi) region.
inline double lambda_ratio(const KiteState& state, const KiteParams& kite) {
    const double sb = std::sin(state.beta), cb = std::cos(state.beta);
    const double sp = std::sin(state.phi_az), cp = std::cos(state.phi_az);
    const double a = -sb * cp * std::cos(state.chi) + sp * std::sin(state.chi);
    const double b = cb * cp;
    const double g = kite.c_lift * std::cos(state.phi_roll) / kite.c_drag;
    const double bf = b - state.reel_factor;
    const double disc = a * a + b * b - 1.0 + g * g * bf * bf;
    if (disc < 0.0)
        throw PositionInfeasible("no real tangential speed ratio: discriminant = " +
                                 std::to_string(disc));
    const double lambda = a + std::sqrt(disc);
    if (lambda < 0.0)
        throw PositionInfeasible("tangential speed ratio is negative: lambda = " +
                                 std::to_string(lambda));
    return lambda;
}

/// Power-optimal reel-out factor (1/3) cos(beta) cos(phi).
inline double reel_out_optimum(double beta, double phi_az) {
    return std::cos(beta) * std::cos(phi_az) / 3.0;
}

inline double resultant_coeff(const KiteParams& kite, double phi_roll) {
    const double cl = kite.c_lift * std::cos(phi_roll);
    return std::sqrt(cl * cl + kite.c_drag * kite.c_drag);
}

/// Tether tension balancing the total aerodynamic force:
/// F = (1/2) rho A c_R [1 + (c_L cos(roll)/c_D)^2] (cos(beta)cos(phi) - f)^2 v_w^2.
inline double tether_force(const KiteState& state, const Environment& env,
                           const KiteParams& kite) {
    const double radial = std::cos(state.beta) * std::cos(state.phi_az) - state.reel_factor;
    if (!(radial > 0.0))
        throw RadialOverrun("radial apparent wind is not positive: cos(beta)cos(phi) - f = " +
                            std::to_string(radial));
    const double g = kite.c_lift * std::cos(state.phi_roll) / kite.c_drag;
    const double vw2 = env.wind_speed * env.wind_speed;
    return 0.5 * env.air_density * kite.area * resultant_coeff(kite, state.phi_roll) *
           (1.0 + g * g) * radial * radial * vw2;
}

/// Traction power P = F * f * v_w plus the intermediate quantities.
inline PowerBreakdown instantaneous_power(const KiteState& state, const Environment& env,
                                          const KiteParams& kite) {
    PowerBreakdown out;
    out.tether_force = tether_force(state, env, kite);
    out.apparent_speed = apparent_speed(state, env, kite);
    out.resultant_coeff = resultant_coeff(kite, state.phi_roll);
    out.instantaneous_power = out.tether_force * state.reel_factor * env.wind_speed;
    return out;
}

/// Instantaneous power at the optimal reel-out factor:
/// P_opt = (1/2) rho A c_R [1 + (c_L cos(roll)/c_D)^2] (4/27) cos^3(beta) cos^3(phi) v_w^3.
/// The cos^3 terms are the cosine losses for flying away from dead downwind.
inline double optimal_power(double beta, double phi_az, double phi_roll, const Environment& env,
                            const KiteParams& kite) {
    const double g = kite.c_lift * std::cos(phi_roll) / kite.c_drag;
    const double c = std::cos(beta) * std::cos(phi_az);
    const double vw3 = env.wind_speed * env.wind_speed * env.wind_speed;
    return 0.5 * env.air_density * kite.area * resultant_coeff(kite, phi_roll) * (1.0 + g * g) *
           (4.0 / 27.0) * c * c * c * vw3;
}

/// Mean of P_opt over an already-sampled path (periodic trapezoid on the
/// uniform grid: endpoints coincide, so the rule reduces to the sample mean).
inline double average_power(const std::vector<PathSample>& samples, const Environment& env,
                            const KiteParams& kite, RollHandling handling = RollHandling::strict) {
    double acc = 0.0;
    for (const PathSample& smp : samples) {
        double roll;
        try {
            roll = roll_angle(smp.kappa_geo, kite, env, handling);
        } catch (const CurvatureInfeasible& e) {
            throw CurvatureInfeasible("path not flyable at s=" + std::to_string(smp.s) + ": " +
                                      e.what());
        }
        acc += optimal_power(smp.beta, smp.phi_az, roll, env, kite);
    }
    return acc / static_cast<double>(samples.size());
}

/// Average traction power over one closed period of the path, with the reel
/// factor at its pointwise optimum and the roll angle dictated by the local
/// geodesic curvature.
inline double average_power(const LissajousPath& path, double r, const Environment& env,
                            const KiteParams& kite, int n) {
    validate(path);
    return average_power(geometry::sample_path(path, r, n), env, kite);
}

}  // namespace kitepath::model
