#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "kitepath/model.hpp"

using namespace kitepath;
using namespace kitepath::model;
using Catch::Approx;

namespace {

constexpr double kPi = kitepath::geometry::kPi;

const KiteParams kDefaultKite{};   // 1 kg, 0.28 m^2, c_L 1.2, c_D 0.12
const Environment kDefaultEnv{};   // 1.225 kg/m^3, 10 m/s

KiteState make_state(double beta, double phi, double chi, double f, double roll) {
    return {beta, phi, chi, f, roll};
}

}  // namespace

TEST_CASE("loyd_power evaluates the ideal crosswind limit") {
    CHECK(loyd_power(kDefaultEnv, kDefaultKite) == Approx(3048.9).margin(0.1));

    Environment fast = kDefaultEnv;
    fast.wind_speed *= 2.0;
    CHECK(loyd_power(fast, kDefaultKite) ==
          Approx(8.0 * loyd_power(kDefaultEnv, kDefaultKite)).epsilon(1e-12));

    KiteParams unit = kDefaultKite;
    unit.c_drag = unit.c_lift;  // glide ratio 1: the (c_L/c_D)^2 factor drops out
    CHECK(loyd_power(kDefaultEnv, unit) ==
          Approx(0.5 * 1.225 * 0.28 * 1.2 * 1000.0 * (4.0 / 27.0)).epsilon(1e-12));
}

TEST_CASE("loyd_power and optimal_power scale linearly in density and area, cubically in wind") {
    Environment env = kDefaultEnv;
    KiteParams kite = kDefaultKite;

    const double base_loyd = loyd_power(env, kite);
    const double base_opt = optimal_power(0.3, 0.2, 0.1, env, kite);

    env.air_density *= 3.0;
    CHECK(loyd_power(env, kite) == Approx(3.0 * base_loyd).epsilon(1e-12));
    CHECK(optimal_power(0.3, 0.2, 0.1, env, kite) == Approx(3.0 * base_opt).epsilon(1e-12));
    env.air_density = kDefaultEnv.air_density;

    kite.area *= 2.0;
    CHECK(loyd_power(env, kite) == Approx(2.0 * base_loyd).epsilon(1e-12));
    CHECK(optimal_power(0.3, 0.2, 0.1, env, kite) == Approx(2.0 * base_opt).epsilon(1e-12));
    kite.area = kDefaultKite.area;

    env.wind_speed *= 2.0;
    CHECK(loyd_power(env, kite) == Approx(8.0 * base_loyd).epsilon(1e-12));
    CHECK(optimal_power(0.3, 0.2, 0.1, env, kite) == Approx(8.0 * base_opt).epsilon(1e-12));
}

TEST_CASE("roll_angle inverts the turning-lift balance") {
    CHECK(roll_angle(0.0, kDefaultKite, kDefaultEnv) == 0.0);

    // rho*A*c_L/2 = 0.2058 for the default kite; kappa = 0.1029 is exactly half.
    CHECK(roll_angle(0.1029, kDefaultKite, kDefaultEnv) == Approx(kPi / 6.0).margin(1e-6));
    CHECK(roll_angle(0.05, kDefaultKite, kDefaultEnv) == Approx(0.245411).epsilon(1e-4));

    CHECK_THROWS_AS(roll_angle(0.21, kDefaultKite, kDefaultEnv), CurvatureInfeasible);
    CHECK_THROWS_AS(roll_angle(-0.01, kDefaultKite, kDefaultEnv), ValidationError);
}

TEST_CASE("roll_angle clamp mode saturates instead of throwing") {
    CHECK(roll_angle(0.21, kDefaultKite, kDefaultEnv, RollHandling::clamp) ==
          Approx(kPi / 2.0).epsilon(1e-12));
    // Below the cap the two modes agree.
    CHECK(roll_angle(0.1, kDefaultKite, kDefaultEnv, RollHandling::clamp) ==
          Approx(roll_angle(0.1, kDefaultKite, kDefaultEnv)).epsilon(1e-15));
}

TEST_CASE("apparent_speed follows the velocity-triangle closure") {
    CHECK(apparent_speed(make_state(0, 0, 0, 0.0, 0), kDefaultEnv, kDefaultKite) ==
          Approx(10.0 * std::sqrt(101.0)).epsilon(1e-12));
    CHECK(apparent_speed(make_state(0, 0, 0, 1.0 / 3.0, 0), kDefaultEnv, kDefaultKite) ==
          Approx((20.0 / 3.0) * std::sqrt(101.0)).epsilon(1e-12));

    const double beta = 0.4, phi = 0.2;
    CHECK_THROWS_AS(
        apparent_speed(make_state(beta, phi, 0, std::cos(beta) * std::cos(phi), 0),
                       kDefaultEnv, kDefaultKite),
        RadialOverrun);
}

TEST_CASE("lambda_ratio matches the maximum-tension simplification") {
    // At beta = phi = 0 the quadratic collapses to lambda = (c_L/c_D)(1 - f).
    CHECK(lambda_ratio(make_state(0, 0, 0.7, 1.0 / 3.0, 0), kDefaultKite) ==
          Approx(10.0 * (2.0 / 3.0)).epsilon(1e-12));
    CHECK(lambda_ratio(make_state(0, 0, -1.2, 1.0, 0), kDefaultKite) ==
          Approx(0.0).margin(1e-12));
}

TEST_CASE("lambda_ratio solutions satisfy the tangential-speed equation") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 1000) {
        const double beta = u(rng) * 1.2;
        const double phi = (u(rng) - 0.5) * 2.4;
        const double chi = (u(rng) - 0.5) * 2.0 * kPi;
        const double roll = u(rng) * 1.3;
        const double b = std::cos(beta) * std::cos(phi);
        const double f = u(rng) * 0.8 * b;
        const KiteState st = make_state(beta, phi, chi, f, roll);

        double lambda;
        try {
            lambda = lambda_ratio(st, kDefaultKite);
        } catch (const PositionInfeasible&) {
            continue;  // state outside the reachable region; not under test
        }
        ++checked;

        // Substituting lambda back must reproduce the geometric-similarity
        // tangential speed G*(b - f), with G the banked glide ratio.
        const double a = -std::sin(beta) * std::cos(phi) * std::cos(chi) +
                         std::sin(phi) * std::sin(chi);
        const double g = kDefaultKite.c_lift * std::cos(roll) / kDefaultKite.c_drag;
        const double tangential = std::sqrt(lambda * lambda - 2.0 * a * lambda + 1.0 - b * b);
        CHECK(tangential == Approx(g * (b - f)).epsilon(1e-9).margin(1e-12));
    }
}

TEST_CASE("lambda_ratio rejects unreachable positions") {
    // Near the sphere's side edge with heavy roll the discriminant goes negative.
    CHECK_THROWS_AS(lambda_ratio(make_state(1.55, 0.0, 0.0, 0.0, 1.56), kDefaultKite),
                    PositionInfeasible);
}

TEST_CASE("reel_out_optimum is a third of the radial wind factor") {
    CHECK(reel_out_optimum(0.0, 0.0) == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(reel_out_optimum(kPi / 3.0, 0.0) == Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("reel_out_optimum maximizes power over the reel factor") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double beta = u(rng) * 1.3;
        const double phi = (u(rng) - 0.5) * 2.6;
        const double c = std::cos(beta) * std::cos(phi);

        // Dense scan of P(f) = const * f * (c - f)^2 over [0, c).
        const int n_grid = 100000;
        double best_f = 0.0, best_p = -1.0;
        for (int j = 0; j < n_grid; ++j) {
            const double f = c * j / n_grid;
            const double p = f * (c - f) * (c - f);
            if (p > best_p) {
                best_p = p;
                best_f = f;
            }
        }
        CHECK(best_f == Approx(reel_out_optimum(beta, phi)).margin(1.5 * c / n_grid));
    }
}

TEST_CASE("reel factor stationarity holds at the optimum") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double beta = u(rng) * 1.2;
        const double phi = (u(rng) - 0.5) * 2.4;
        const double roll = u(rng) * 1.2;
        const double f_opt = reel_out_optimum(beta, phi);
        const double h = 1e-6;

        auto power_at = [&](double f) {
            return instantaneous_power(make_state(beta, phi, 0, f, roll), kDefaultEnv, kDefaultKite)
                .instantaneous_power;
        };
        const double p0 = power_at(f_opt);
        const double deriv = (power_at(f_opt + h) - power_at(f_opt - h)) / (2.0 * h);
        CHECK(std::abs(deriv) < 1e-6 * std::max(p0, 1.0) / h * h + 1e-4 * p0);
        CHECK(p0 >= power_at(f_opt * 0.9));
        CHECK(p0 >= power_at(f_opt * 1.1));
    }
}

TEST_CASE("tether_force reproduces the closed-form tension") {
    CHECK(tether_force(make_state(0, 0, 0, 1.0 / 3.0, 0), kDefaultEnv, kDefaultKite) ==
          Approx(928.4).epsilon(2e-4));

    // Fully banked wing: resultant collapses to drag and the bracket to 1.
    const double near_flat = kPi / 2.0 - 1e-9;
    const double drag_only =
        0.5 * 1.225 * 0.28 * 0.12 * (2.0 / 3.0) * (2.0 / 3.0) * 100.0;
    CHECK(tether_force(make_state(0, 0, 0, 1.0 / 3.0, near_flat), kDefaultEnv, kDefaultKite) ==
          Approx(drag_only).epsilon(1e-6));
}

TEST_CASE("instantaneous power is tension times reel-out speed") {
    const PowerBreakdown idle =
        instantaneous_power(make_state(0, 0, 0, 0.0, 0), kDefaultEnv, kDefaultKite);
    CHECK(idle.instantaneous_power == 0.0);
    CHECK(idle.tether_force > 0.0);

    CHECK(instantaneous_power(make_state(0, 0, 0, 1.0 / 3.0, 0), kDefaultEnv, kDefaultKite)
              .instantaneous_power == Approx(3094.7).epsilon(2e-4));

    std::mt19937 rng(37);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double beta = u(rng) * 1.2;
        const double phi = (u(rng) - 0.5) * 2.4;
        const double roll = u(rng) * 1.2;
        const double b = std::cos(beta) * std::cos(phi);
        const double f = u(rng) * 0.9 * b;
        const KiteState st = make_state(beta, phi, 0, f, roll);

        const PowerBreakdown pb = instantaneous_power(st, kDefaultEnv, kDefaultKite);
        CHECK(pb.instantaneous_power ==
              Approx(pb.tether_force * f * kDefaultEnv.wind_speed).epsilon(1e-9).margin(1e-12));
    }
}

TEST_CASE("no reel factor beats the optimal one") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double beta = u(rng) * 1.2;
        const double phi = (u(rng) - 0.5) * 2.4;
        const double roll = u(rng) * 1.2;
        const double b = std::cos(beta) * std::cos(phi);
        const double f_opt = reel_out_optimum(beta, phi);
        const double p_opt =
            instantaneous_power(make_state(beta, phi, 0, f_opt, roll), kDefaultEnv, kDefaultKite)
                .instantaneous_power;
        for (int j = 0; j < 1000; ++j) {
            const double f = u(rng) * b * 0.999;
            const double p =
                instantaneous_power(make_state(beta, phi, 0, f, roll), kDefaultEnv, kDefaultKite)
                    .instantaneous_power;
            CHECK(p <= p_opt * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("optimal_power matches instantaneous power at the optimal reel factor") {
    CHECK(optimal_power(0, 0, 0, kDefaultEnv, kDefaultKite) == Approx(3094.7).epsilon(2e-4));
    CHECK(optimal_power(0, 0, 0, kDefaultEnv, kDefaultKite) ==
          Approx(1.015 * loyd_power(kDefaultEnv, kDefaultKite)).epsilon(1e-3));

    CHECK(optimal_power(kPi / 3.0, 0, 0, kDefaultEnv, kDefaultKite) ==
          Approx(optimal_power(0, 0, 0, kDefaultEnv, kDefaultKite) / 8.0).epsilon(1e-12));

    std::mt19937 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double beta = u(rng) * 1.3;
        const double phi = (u(rng) - 0.5) * 2.6;
        const double roll = u(rng) * 1.3;
        const double direct = optimal_power(beta, phi, roll, kDefaultEnv, kDefaultKite);
        const double via_f =
            instantaneous_power(make_state(beta, phi, 0, reel_out_optimum(beta, phi), roll),
                                kDefaultEnv, kDefaultKite)
                .instantaneous_power;
        CHECK(direct == Approx(via_f).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("optimal_power decreases away from the downwind point") {
    double prev = optimal_power(0.0, 0.0, 0.2, kDefaultEnv, kDefaultKite);
    for (double beta = 0.1; beta < kPi / 2.0; beta += 0.1) {
        const double p = optimal_power(beta, 0.0, 0.2, kDefaultEnv, kDefaultKite);
        CHECK(p < prev);
        prev = p;
    }
    prev = optimal_power(0.3, 0.0, 0.2, kDefaultEnv, kDefaultKite);
    for (double phi = 0.1; phi < kPi / 2.0; phi += 0.1) {
        const double p = optimal_power(0.3, phi, 0.2, kDefaultEnv, kDefaultKite);
        CHECK(p < prev);
        CHECK(p == Approx(optimal_power(0.3, -phi, 0.2, kDefaultEnv, kDefaultKite)).epsilon(1e-12));
        prev = p;
    }
}

TEST_CASE("rolling to 30 degrees attenuates power through the resultant coefficient") {
    const double ratio = optimal_power(0, 0, kPi / 6.0, kDefaultEnv, kDefaultKite) /
                         optimal_power(0, 0, 0.0, kDefaultEnv, kDefaultKite);
    // Closed form: ((c_L cos30)^2 + c_D^2)^(3/2) / (c_L^2 + c_D^2)^(3/2).
    CHECK(ratio == Approx(0.6527371452404758).epsilon(1e-9));
    // Never worse than the pure cos^3 envelope.
    CHECK(ratio >= std::pow(std::cos(kPi / 6.0), 3.0));
    CHECK(ratio < 1.0);
}

TEST_CASE("average_power of a constant integrand is the constant") {
    // Hand-built sample set: same state at every s, so the quadrature must
    // return exactly the pointwise value.
    std::vector<PathSample> samples(16);
    for (size_t i = 0; i < samples.size(); ++i) {
        samples[i].s = 2.0 * kPi * static_cast<double>(i) / 16.0;
        samples[i].beta = 0.4;
        samples[i].phi_az = 0.1;
        samples[i].kappa_geo = 0.03;
    }
    const double roll = roll_angle(0.03, kDefaultKite, kDefaultEnv);
    const double pointwise = optimal_power(0.4, 0.1, roll, kDefaultEnv, kDefaultKite);
    CHECK(average_power(samples, kDefaultEnv, kDefaultKite) == Approx(pointwise).epsilon(1e-12));
}

TEST_CASE("coarse quadrature agrees with a dense one") {
    // This flat, wide ellipse exceeds the wing's roll capability near its
    // azimuth apexes, so the quadrature is exercised in clamp mode (strict
    // mode refuses the path; see the propagation test below). The clamped
    // integrand is continuous, which is all the convergence claim needs.
    const LissajousPath clamped_fixture{0.3, 0.08, 0.25, 1, 1};
    const double coarse =
        average_power(geometry::sample_path(clamped_fixture, 150.0, 360), kDefaultEnv,
                      kDefaultKite, RollHandling::clamp);
    const double dense =
        average_power(geometry::sample_path(clamped_fixture, 150.0, 36000), kDefaultEnv,
                      kDefaultKite, RollHandling::clamp);
    CHECK(coarse == Approx(dense).epsilon(1e-4));

    // A rounder ellipse stays inside the roll limit; strict mode converges too.
    const LissajousPath strict_fixture{0.3, 0.15, 0.25, 1, 1};
    const double strict_coarse = average_power(strict_fixture, 150.0, kDefaultEnv, kDefaultKite, 360);
    const double strict_dense =
        average_power(strict_fixture, 150.0, kDefaultEnv, kDefaultKite, 36000);
    CHECK(strict_coarse == Approx(strict_dense).epsilon(1e-4));
}

TEST_CASE("average power never exceeds the corrected ideal bound") {
    const double bound = 1.0150224 * loyd_power(kDefaultEnv, kDefaultKite);
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 50) {
        const double dbeta = 0.02 + u(rng) * 0.25;
        const double dphi = 0.05 + u(rng) * 0.8;
        const double beta0 = dbeta + u(rng) * (kPi / 2.0 - 2.0 * dbeta);
        const LissajousPath p{beta0, dbeta, dphi, (checked % 2) ? 2 : 1, 1};
        try {
            const double avg = average_power(p, 150.0, kDefaultEnv, kDefaultKite, 360);
            CHECK(avg <= bound * (1.0 + 1e-9));
            ++checked;
        } catch (const CurvatureInfeasible&) {
            // Too tight to fly; outside this property's domain.
        }
    }
}

TEST_CASE("average_power names the offending sample when the path cannot be flown") {
    // Half-degree ranges at r=100 demand far tighter turns than the wing allows.
    const LissajousPath tiny{0.35, 0.0087266, 0.0087266, 1, 1};
    try {
        average_power(tiny, 100.0, kDefaultEnv, kDefaultKite, 360);
        FAIL("expected CurvatureInfeasible");
    } catch (const CurvatureInfeasible& e) {
        CHECK(std::string(e.what()).find("s=") != std::string::npos);
    }
}
