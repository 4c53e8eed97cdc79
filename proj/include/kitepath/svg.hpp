#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "kitepath/geometry.hpp"
#include "kitepath/output.hpp"
#include "kitepath/sweep.hpp"

namespace kitepath::cli {

/// Minimal static SVG 1.1 line plots. No timestamps, no randomness: the same
/// data always yields the same bytes. Pixel coordinates are rounded to 0.01 so
/// the output does not depend on printf long-double quirks.
namespace svg {

struct Series {
    std::string label;  // empty = no legend entry
    std::vector<std::array<double, 2>> points;
    bool dashed = false;
    int color = -1;  // palette override; default cycles by series order
};

inline const char* palette(std::size_t i) {
    static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#8c564b"};
    return kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
}

inline std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Frame {
    static constexpr double kWidth = 640.0, kHeight = 480.0;
    static constexpr double kLeft = 72.0, kRight = 616.0, kTop = 48.0, kBottom = 432.0;
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;

    double map_x(double x) const {
        return kLeft + (x - x_lo) / (x_hi - x_lo) * (kRight - kLeft);
    }
    double map_y(double y) const {
        return kBottom - (y - y_lo) / (y_hi - y_lo) * (kBottom - kTop);
    }
};

/// Data bounds over all series, padded so curves do not touch the frame.
/// `equal_scale` keeps one unit equal in both directions (for spatial plots).
inline Frame fit_frame(const std::vector<Series>& series, bool equal_scale = false) {
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const Series& s : series)
        for (const auto& p : s.points) {
            x_lo = std::min(x_lo, p[0]);
            x_hi = std::max(x_hi, p[0]);
            y_lo = std::min(y_lo, p[1]);
            y_hi = std::max(y_hi, p[1]);
        }
    if (!(x_lo <= x_hi)) { x_lo = 0.0; x_hi = 1.0; }
    if (!(y_lo <= y_hi)) { y_lo = 0.0; y_hi = 1.0; }
    double dx = x_hi - x_lo, dy = y_hi - y_lo;
    if (dx <= 0.0) dx = std::max(1.0, std::abs(x_lo));
    if (dy <= 0.0) dy = std::max(1.0, std::abs(y_lo));
    if (equal_scale) {
        // Match units-per-pixel in both axes by widening the smaller span.
        const double per_px_x = dx / (Frame::kRight - Frame::kLeft);
        const double per_px_y = dy / (Frame::kBottom - Frame::kTop);
        const double per_px = std::max(per_px_x, per_px_y);
        const double cx = 0.5 * (x_lo + x_hi), cy = 0.5 * (y_lo + y_hi);
        dx = per_px * (Frame::kRight - Frame::kLeft);
        dy = per_px * (Frame::kBottom - Frame::kTop);
        x_lo = cx - 0.5 * dx; x_hi = cx + 0.5 * dx;
        y_lo = cy - 0.5 * dy; y_hi = cy + 0.5 * dy;
    }
    Frame f;
    f.x_lo = x_lo - 0.05 * dx;
    f.x_hi = x_hi + 0.05 * dx;
    f.y_lo = y_lo - 0.05 * dy;
    f.y_hi = y_hi + 0.05 * dy;
    return f;
}

inline std::string line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<Series>& series,
                             bool equal_scale = false) {
    const Frame f = fit_frame(series, equal_scale);
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" "
           "height=\"480\" viewBox=\"0 0 640 480\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
    out += "<text x=\"320\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
           "text-anchor=\"middle\">" + title + "</text>\n";

    // Frame, ticks, grid.
    out += "<rect x=\"" + px(Frame::kLeft) + "\" y=\"" + px(Frame::kTop) + "\" width=\"" +
           px(Frame::kRight - Frame::kLeft) + "\" height=\"" + px(Frame::kBottom - Frame::kTop) +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double tx = f.x_lo + (f.x_hi - f.x_lo) * i / 5.0;
        const double ty = f.y_lo + (f.y_hi - f.y_lo) * i / 5.0;
        const std::string gx = px(f.map_x(tx)), gy = px(f.map_y(ty));
        if (i > 0 && i < 5) {
            out += "<line x1=\"" + gx + "\" y1=\"" + px(Frame::kTop) + "\" x2=\"" + gx +
                   "\" y2=\"" + px(Frame::kBottom) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
            out += "<line x1=\"" + px(Frame::kLeft) + "\" y1=\"" + gy + "\" x2=\"" +
                   px(Frame::kRight) + "\" y2=\"" + gy +
                   "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        }
        out += "<text x=\"" + gx + "\" y=\"" + px(Frame::kBottom + 18.0) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
               tick_label(tx) + "</text>\n";
        out += "<text x=\"" + px(Frame::kLeft - 8.0) + "\" y=\"" + px(f.map_y(ty) + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
               tick_label(ty) + "</text>\n";
    }
    out += "<text x=\"320\" y=\"466\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\">" + x_label + "</text>\n";
    out += "<text x=\"16\" y=\"240\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 16 240)\">" + y_label + "</text>\n";

    // Curves and legend.
    std::size_t legend_row = 0;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        const char* color = palette(s.color >= 0 ? static_cast<std::size_t>(s.color) : k);
        out += "<polyline fill=\"none\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"1.5\"";
        if (s.dashed) out += " stroke-dasharray=\"6 4\"";
        out += " points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            if (i > 0) out += ' ';
            out += px(f.map_x(s.points[i][0])) + ',' + px(f.map_y(s.points[i][1]));
        }
        out += "\"/>\n";
        if (s.label.empty()) continue;
        const double ly = Frame::kTop + 16.0 + 16.0 * static_cast<double>(legend_row++);
        out += "<line x1=\"" + px(Frame::kLeft + 10.0) + "\" y1=\"" + px(ly - 4.0) + "\" x2=\"" +
               px(Frame::kLeft + 34.0) + "\" y2=\"" + px(ly - 4.0) + "\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"1.5\"";
        if (s.dashed) out += " stroke-dasharray=\"6 4\"";
        out += "/>\n";
        out += "<text x=\"" + px(Frame::kLeft + 40.0) + "\" y=\"" + px(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace svg

inline std::string power_vs_r_svg(const std::vector<OutputRecord>& records) {
    svg::Series power{"p_avg", {}, false};
    svg::Series loyd{"p_loyd", {}, true};
    for (const OutputRecord& r : records) {
        power.points.push_back({r.r_m, r.p_avg_w});
        loyd.points.push_back({r.r_m, r.p_loyd_w});
    }
    return svg::line_plot("Average power vs tether length", "r [m]", "P [W]", {power, loyd});
}

inline std::string params_vs_r_svg(const std::vector<OutputRecord>& records) {
    svg::Series beta0{"beta0", {}, false};
    svg::Series dbeta{"dbeta", {}, false};
    svg::Series dphi{"dphi", {}, false};
    for (const OutputRecord& r : records) {
        beta0.points.push_back({r.r_m, r.beta0_rad});
        dbeta.points.push_back({r.r_m, r.dbeta_rad});
        dphi.points.push_back({r.r_m, r.dphi_rad});
    }
    return svg::line_plot("Optimal path parameters vs tether length", "r [m]", "angle [rad]",
                          {beta0, dbeta, dphi});
}

namespace svg {

/// First, middle, and last grid index: enough paths to show the trend without
/// turning the plot into a hairball.
inline std::vector<std::size_t> representative_indices(std::size_t n) {
    if (n <= 2) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    return {0, n / 2, n - 1};
}

inline std::string radius_label(double r) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "r = %.4g m", r);
    return buf;
}

}  // namespace svg

inline std::string paths_plane_svg(const sweep::SweepResult& res, int n_points = 181) {
    std::vector<svg::Series> series;
    constexpr double kDeg = 180.0 / geometry::kPi;
    for (std::size_t i : svg::representative_indices(res.grid.size())) {
        svg::Series s{svg::radius_label(res.grid[i]), {}, false};
        for (int k = 0; k <= n_points; ++k) {
            const double t = 2.0 * geometry::kPi * k / n_points;
            const geometry::PathAngles a = geometry::eval_path(res.solutions[i].path, t);
            s.points.push_back({a.phi_az * kDeg, a.beta * kDeg});
        }
        series.push_back(std::move(s));
    }
    return svg::line_plot("Optimal paths, angle plane", "azimuth [deg]", "elevation [deg]",
                          series);
}

inline std::string paths_3d_svg(const sweep::SweepResult& res, int n_points = 181) {
    // Orthographic camera at azimuth 35 deg, elevation 25 deg; x downwind, z up.
    constexpr double kAzim = 35.0 * geometry::kPi / 180.0;
    constexpr double kElev = 25.0 * geometry::kPi / 180.0;
    const double ca = std::cos(kAzim), sa = std::sin(kAzim);
    const double ce = std::cos(kElev), se = std::sin(kElev);
    const auto project = [&](const Vec3& p) -> std::array<double, 2> {
        return {-p.x * sa + p.y * ca, -p.x * ca * se - p.y * sa * se + p.z * ce};
    };

    std::vector<svg::Series> series;
    int slot = 0;
    for (std::size_t i : svg::representative_indices(res.grid.size())) {
        // Tether ray from the ground station to the path's start point, in the
        // same color as the path it belongs to.
        svg::Series tether{"", {}, true, slot};
        tether.points.push_back(project({0.0, 0.0, 0.0}));
        tether.points.push_back(project(geometry::embed_3d(res.solutions[i].path, 0.0, res.grid[i])));
        series.push_back(std::move(tether));

        svg::Series s{svg::radius_label(res.grid[i]), {}, false, slot};
        for (int k = 0; k <= n_points; ++k) {
            const double t = 2.0 * geometry::kPi * k / n_points;
            s.points.push_back(project(geometry::embed_3d(res.solutions[i].path, t, res.grid[i])));
        }
        series.push_back(std::move(s));
        ++slot;
    }
    return svg::line_plot("Optimal paths, isometric projection", "", "", series, true);
}

}  // namespace kitepath::cli
