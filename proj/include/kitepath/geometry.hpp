#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kitepath/errors.hpp"
#include "kitepath/types.hpp"

namespace kitepath::geometry {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct PathAngles {
    double beta;    // rad
    double phi_az;  // rad
};

struct PathDerivs {
    double dbeta_ds;
    double dphi_ds;
    double d2beta_ds2;
    double d2phi_ds2;
};

struct Curvatures {
    double kappa_total;  // 1/m
    double kappa_geo;    // 1/m
};

/// Path angles at parameter s. Periodic; accepts any real s.
inline PathAngles eval_path(const LissajousPath& path, double s) {
    const double q = path.ratio();
    return {path.beta0 + path.dbeta * std::sin(q * s), path.dphi * std::cos(s)};
}

/// First and second derivatives of the path angles with respect to s.
inline PathDerivs path_derivatives(const LissajousPath& path, double s) {
    const double q = path.ratio();
    PathDerivs d;
    d.dbeta_ds = path.dbeta * q * std::cos(q * s);
    d.dphi_ds = -path.dphi * std::sin(s);
    d.d2beta_ds2 = -path.dbeta * q * q * std::sin(q * s);
    d.d2phi_ds2 = -path.dphi * std::cos(s);
    return d;
}

/// Tangential heading relative to the elevation direction, in (-pi, pi].
inline double heading(const LissajousPath& path, double s) {
    const PathDerivs d = path_derivatives(path, s);
    if (std::abs(d.dbeta_ds) < 1e-12 && std::abs(d.dphi_ds) < 1e-12)
        throw DegeneratePath("heading undefined: both angular derivatives vanish at s=" +
                             std::to_string(s));
    return std::atan2(d.dphi_ds, d.dbeta_ds);
}

/// Cartesian point of the path on the sphere of radius r. x points downwind,
/// z up; the origin is the ground attachment.
inline Vec3 embed_3d(const LissajousPath& path, double s, double r) {
    if (!(r > 0.0)) throw InvalidRadius("tether length must be positive, got " + std::to_string(r));
    const PathAngles a = eval_path(path, s);
    const double cb = std::cos(a.beta);
    return {r * cb * std::cos(a.phi_az), r * cb * std::sin(a.phi_az), r * std::sin(a.beta)};
}

/// Total and geodesic curvature of the embedded path at s.
///
/// Total curvature is |p' x p''| / |p'|^3 with p', p'' obtained by chaining the
/// angle derivatives through the spherical embedding. The normal component of
/// any spherical curve's curvature is 1/r, so the in-surface (geodesic) part is
/// sqrt(kappa^2 - 1/r^2); the argument is clamped at zero because rounding can
/// push it to ~-1e-16 where the curve locally follows a great circle.
inline Curvatures curvature(const LissajousPath& path, double s, double r) {
    if (!(r > 0.0)) throw InvalidRadius("tether length must be positive, got " + std::to_string(r));
    const PathAngles a = eval_path(path, s);
    const PathDerivs d = path_derivatives(path, s);

    const double sb = std::sin(a.beta), cb = std::cos(a.beta);
    const double sp = std::sin(a.phi_az), cp = std::cos(a.phi_az);
    const double b1 = d.dbeta_ds, p1 = d.dphi_ds;
    const double b2 = d.d2beta_ds2, p2 = d.d2phi_ds2;

    const Vec3 dp = {r * (-sb * cp * b1 - cb * sp * p1),
                     r * (-sb * sp * b1 + cb * cp * p1),
                     r * (cb * b1)};
    const double sq = b1 * b1 + p1 * p1;
    const Vec3 ddp = {r * (-cb * cp * sq + 2.0 * sb * sp * b1 * p1 - sb * cp * b2 - cb * sp * p2),
                      r * (-cb * sp * sq - 2.0 * sb * cp * b1 * p1 - sb * sp * b2 + cb * cp * p2),
                      r * (-sb * b1 * b1 + cb * b2)};

    const double speed = dp.norm();
    if (speed < 1e-12)
        throw DegeneratePath("curvature undefined: stationary point at s=" + std::to_string(s));

    const double kappa = cross(dp, ddp).norm() / (speed * speed * speed);
    const double geo_sq = kappa * kappa - 1.0 / (r * r);
    return {kappa, std::sqrt(std::max(0.0, geo_sq))};
}

/// Uniform discretization of one closed period: n samples at s_i = 2*pi*i/n.
/// This grid is the single source for both the power quadrature and the
/// curvature constraint rows.
inline std::vector<PathSample> sample_path(const LissajousPath& path, double r, int n) {
    if (n < 8) throw ValidationError("grid_n", "need at least 8 samples, got " + std::to_string(n));
    if (!(r > 0.0)) throw InvalidRadius("tether length must be positive, got " + std::to_string(r));

    std::vector<PathSample> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double s = 2.0 * kPi * i / n;
        PathSample& smp = out[static_cast<size_t>(i)];
        const PathAngles a = eval_path(path, s);
        const PathDerivs d = path_derivatives(path, s);
        const Curvatures k = curvature(path, s, r);
        smp.s = s;
        smp.beta = a.beta;
        smp.phi_az = a.phi_az;
        smp.dbeta_ds = d.dbeta_ds;
        smp.dphi_ds = d.dphi_ds;
        smp.d2beta_ds2 = d.d2beta_ds2;
        smp.d2phi_ds2 = d.d2phi_ds2;
        smp.chi = heading(path, s);
        smp.kappa_total = k.kappa_total;
        smp.kappa_geo = k.kappa_geo;
    }
    return out;
}

}  // namespace kitepath::geometry
