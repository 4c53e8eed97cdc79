#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "kitepath/config.hpp"
#include "kitepath/model.hpp"
#include "kitepath/optimizer.hpp"
#include "kitepath/sweep.hpp"

namespace kitepath::cli {

/// Numeric rendering for all text artifacts: 9 significant digits, '.'
/// decimal, no grouping. snprintf with the default C locale keeps the output
/// byte-stable across machines.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// The same value a CSV reader would recover, so JSON and CSV artifacts carry
/// identical numbers rather than merely close ones.
inline double rounded(double v) { return std::stod(format_number(v)); }

/// One result row of a tether-length sweep.
struct OutputRecord {
    double r_m = 0.0;
    double beta0_rad = 0.0;
    double dbeta_rad = 0.0;
    double dphi_rad = 0.0;
    double p_avg_w = 0.0;
    double p_loyd_w = 0.0;
    double loyd_ratio = 0.0;
    double max_kappa = 0.0;
    std::vector<std::string> active_constraints;
    int iterations = 0;
    bool converged = false;
};

inline constexpr const char* kRecordHeader =
    "r_m,beta0_rad,dbeta_rad,dphi_rad,p_avg_w,p_loyd_w,loyd_ratio,max_kappa,"
    "active_constraints,iterations,converged";

inline OutputRecord make_record(double r, const optimizer::PlanSolution& sol, double p_loyd) {
    OutputRecord rec;
    rec.r_m = r;
    rec.beta0_rad = sol.path.beta0;
    rec.dbeta_rad = sol.path.dbeta;
    rec.dphi_rad = sol.path.dphi;
    rec.p_avg_w = sol.p_avg;
    rec.p_loyd_w = p_loyd;
    rec.loyd_ratio = sol.loyd_ratio;
    rec.max_kappa = sol.max_kappa_on_grid;
    rec.active_constraints = sol.active_constraints;
    rec.iterations = sol.iterations;
    rec.converged = sol.converged;
    return rec;
}

inline std::vector<OutputRecord> make_records(const sweep::SweepResult& res,
                                              const Environment& env, const KiteParams& kite) {
    const double p_loyd = model::loyd_power(env, kite);
    std::vector<OutputRecord> records;
    records.reserve(res.grid.size());
    for (std::size_t i = 0; i < res.grid.size(); ++i)
        records.push_back(make_record(res.grid[i], res.solutions[i], p_loyd));
    return records;
}

inline std::string join_labels(const std::vector<std::string>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i > 0) out += '|';
        out += labels[i];
    }
    return out;
}

inline std::string to_csv(const std::vector<OutputRecord>& records) {
    std::string out = kRecordHeader;
    out += '\n';
    for (const OutputRecord& r : records) {
        out += format_number(r.r_m) + ',' + format_number(r.beta0_rad) + ',' +
               format_number(r.dbeta_rad) + ',' + format_number(r.dphi_rad) + ',' +
               format_number(r.p_avg_w) + ',' + format_number(r.p_loyd_w) + ',' +
               format_number(r.loyd_ratio) + ',' + format_number(r.max_kappa) + ',' +
               join_labels(r.active_constraints) + ',' + std::to_string(r.iterations) + ',' +
               (r.converged ? "true" : "false") + '\n';
    }
    return out;
}

inline nlohmann::ordered_json to_json(const std::vector<OutputRecord>& records) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const OutputRecord& r : records) {
        nlohmann::ordered_json row;
        row["r_m"] = rounded(r.r_m);
        row["beta0_rad"] = rounded(r.beta0_rad);
        row["dbeta_rad"] = rounded(r.dbeta_rad);
        row["dphi_rad"] = rounded(r.dphi_rad);
        row["p_avg_w"] = rounded(r.p_avg_w);
        row["p_loyd_w"] = rounded(r.p_loyd_w);
        row["loyd_ratio"] = rounded(r.loyd_ratio);
        row["max_kappa"] = rounded(r.max_kappa);
        row["active_constraints"] = r.active_constraints;
        row["iterations"] = r.iterations;
        row["converged"] = r.converged;
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Spline artifact: enough to rebuild each natural cubic interpolant exactly
/// (knot abscissae, knot values, knot second derivatives).
inline nlohmann::ordered_json splines_to_json(const sweep::ParamSplines& splines) {
    const auto one = [](const sweep::CubicSpline& s) {
        nlohmann::ordered_json obj;
        obj["knots_r"] = s.knots();
        obj["values"] = s.values();
        obj["second_derivs"] = s.second_derivs();
        return obj;
    };
    nlohmann::ordered_json doc;
    doc["beta0"] = one(splines.beta0);
    doc["dbeta"] = one(splines.dbeta);
    doc["dphi"] = one(splines.dphi);
    return doc;
}

}  // namespace kitepath::cli
