#pragma once

#include <cmath>

#include "kitepath/errors.hpp"

namespace kitepath {

/// Physical kite constants.
struct KiteParams {
    double mass = 1.0;     // kg
    double area = 0.28;    // m^2
    double c_lift = 1.2;   // lift coefficient
    double c_drag = 0.12;  // drag coefficient
};

/// Ambient conditions, assumed uniform and steady.
struct Environment {
    double air_density = 1.225;  // kg/m^3
    double wind_speed = 10.0;    // m/s, horizontal
};

/// Closed two-frequency reference path in the (azimuth, elevation) plane:
///   beta(s) = beta0 + dbeta * sin((n_beta/n_phi) * s)
///   phi(s)  = dphi * cos(s)
/// Ratio 1 traces an ellipse, ratio 2 a figure-of-eight. Both close at s = 2*pi.
struct LissajousPath {
    double beta0 = 0.0;  // rad, central elevation
    double dbeta = 0.0;  // rad, elevation half-range
    double dphi = 0.0;   // rad, azimuth half-range
    int n_beta = 1;      // cycles along beta per period
    int n_phi = 1;       // cycles along phi per period

    double ratio() const { return static_cast<double>(n_beta) / n_phi; }
};

/// One point of the discretized path with everything downstream consumers need.
struct PathSample {
    double s = 0.0;        // rad, path parameter
    double beta = 0.0;     // rad
    double phi_az = 0.0;   // rad
    double dbeta_ds = 0.0;
    double dphi_ds = 0.0;
    double d2beta_ds2 = 0.0;
    double d2phi_ds2 = 0.0;
    double chi = 0.0;         // rad, tangential heading in (-pi, pi]
    double kappa_total = 0.0; // 1/m
    double kappa_geo = 0.0;   // 1/m
};

/// Quasi-static kite state at one point of the path.
struct KiteState {
    double beta = 0.0;         // rad, elevation in [0, pi/2]
    double phi_az = 0.0;       // rad, azimuth in [-pi/2, pi/2]
    double chi = 0.0;          // rad, heading
    double reel_factor = 0.0;  // radial speed / wind speed, in [0, 1)
    double phi_roll = 0.0;     // rad, roll in [0, pi/2)
};

/// Force/power quantities at one state.
struct PowerBreakdown {
    double tether_force = 0.0;         // N
    double instantaneous_power = 0.0;  // W
    double apparent_speed = 0.0;       // m/s
    double resultant_coeff = 0.0;      // c_R = sqrt((c_L cos(roll))^2 + c_D^2)
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }

    friend Vec3 operator-(const Vec3& a, const Vec3& b) {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
    friend Vec3 cross(const Vec3& a, const Vec3& b) {
        return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
    }
};

inline void validate(const KiteParams& k) {
    if (!(k.mass > 0.0)) throw ValidationError("kite.mass", "must be positive");
    if (!(k.area > 0.0)) throw ValidationError("kite.area", "must be positive");
    if (!(k.c_lift > 0.0)) throw ValidationError("kite.c_lift", "must be positive");
    if (!(k.c_drag > 0.0)) throw ValidationError("kite.c_drag", "must be positive");
    if (!(k.c_lift / k.c_drag > 1.0))
        throw ValidationError("kite.c_lift", "glide ratio c_lift/c_drag must exceed 1");
}

inline void validate(const Environment& e) {
    if (!(e.air_density > 0.0)) throw ValidationError("environment.air_density", "must be positive");
    if (!(e.wind_speed > 0.0)) throw ValidationError("environment.wind_speed", "must be positive");
}

inline void validate(const LissajousPath& p) {
    if (!(p.dbeta > 0.0)) throw ValidationError("path.dbeta", "must be positive");
    if (!(p.dphi > 0.0)) throw ValidationError("path.dphi", "must be positive");
    if (!(p.beta0 - p.dbeta >= 0.0))
        throw ValidationError("path.beta0", "beta0 - dbeta must be nonnegative");
    constexpr double half_pi = 1.5707963267948966;
    if (!(p.beta0 + p.dbeta <= half_pi))
        throw ValidationError("path.beta0", "beta0 + dbeta must not exceed pi/2");
    if (!(p.dphi <= half_pi)) throw ValidationError("path.dphi", "must not exceed pi/2");
    if (p.n_beta < 1 || p.n_phi < 1)
        throw ValidationError("path.n_beta", "frequency integers must be positive");
}

}  // namespace kitepath
