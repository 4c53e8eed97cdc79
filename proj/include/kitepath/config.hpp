#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kitepath/errors.hpp"
#include "kitepath/types.hpp"

namespace kitepath {

struct SweepRange {
    double r_min = 100.0;  // m
    double r_max = 200.0;  // m
    double dr = 5.0;       // m
};

/// Box bounds for the decision variables, degrees (user-facing unit). The
/// lower bound for beta0 is always the altitude-derived minimum elevation and
/// is not configurable.
struct BoundsConfig {
    double dbeta_min_deg = 0.5;
    double dbeta_max_deg = 45.0;
    double dphi_min_deg = 0.5;
    double dphi_max_deg = 90.0;
    double beta0_max_deg = 90.0;
};

struct ConstraintConfig {
    double phi_max_deg = 30.0;  // roll limit
    double h_min = 30.0;        // m, altitude floor
    double h_max = 150.0;       // m, altitude ceiling
    std::optional<double> f_tether_max;  // N
    std::optional<double> p_rated;       // W
};

struct OutputConfig {
    std::string directory = ".";
    std::vector<std::string> formats = {"csv", "json"};  // subset of csv, json, svg
};

struct RunConfig {
    KiteParams kite;
    Environment environment;
    ConstraintConfig constraints;
    std::string shape = "ellipse";  // or "eight"
    int grid_n = 360;
    SweepRange sweep;
    BoundsConfig bounds;
    OutputConfig output;

    int shape_n_beta() const { return shape == "eight" ? 2 : 1; }
    int shape_n_phi() const { return 1; }
};

}  // namespace kitepath

namespace kitepath::cli {

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& path,
                                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || (item.key() == key);
        if (!known)
            throw ParseError("unknown key '" + (path.empty() ? "" : path + ".") + item.key() + "'");
    }
}

inline double get_number(const json& obj, const std::string& path, const char* key,
                         double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ParseError("'" + path + key + "' must be a number");
    return v.get<double>();
}

inline std::optional<double> get_optional_number(const json& obj, const std::string& path,
                                                 const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ParseError("'" + path + key + "' must be a number");
    return v.get<double>();
}

inline int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ParseError("'" + path + key + "' must be an integer");
    return v.get<int>();
}

inline std::string get_string(const json& obj, const std::string& path, const char* key,
                              const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ParseError("'" + path + key + "' must be a string");
    return v.get<std::string>();
}

}  // namespace detail

inline void validate(const RunConfig& cfg) {
    kitepath::validate(cfg.kite);
    kitepath::validate(cfg.environment);

    if (cfg.shape != "ellipse" && cfg.shape != "eight")
        throw ValidationError("shape", "must be \"ellipse\" or \"eight\"");
    if (cfg.grid_n < 8) throw ValidationError("grid_n", "must be at least 8");

    const ConstraintConfig& c = cfg.constraints;
    if (!(c.phi_max_deg > 0.0 && c.phi_max_deg < 90.0))
        throw ValidationError("constraints.phi_max_deg", "must be in (0, 90)");
    if (!(c.h_min > 0.0)) throw ValidationError("constraints.h_min", "must be positive");
    if (!(c.h_max > c.h_min))
        throw ValidationError("constraints.h_max", "must exceed h_min");
    if (c.f_tether_max && !(*c.f_tether_max > 0.0))
        throw ValidationError("constraints.f_tether_max", "must be positive");
    if (c.p_rated && !(*c.p_rated > 0.0))
        throw ValidationError("constraints.p_rated", "must be positive");

    const SweepRange& s = cfg.sweep;
    if (!(s.r_min > 0.0)) throw ValidationError("sweep.r_min", "must be positive");
    if (!(s.r_max >= s.r_min)) throw ValidationError("sweep.r_max", "must be >= r_min");
    if (!(s.dr > 0.0)) throw ValidationError("sweep.dr", "must be positive");

    const BoundsConfig& b = cfg.bounds;
    if (!(b.dbeta_min_deg > 0.0 && b.dbeta_min_deg <= b.dbeta_max_deg && b.dbeta_max_deg <= 90.0))
        throw ValidationError("bounds.dbeta_min_deg", "need 0 < min <= max <= 90");
    if (!(b.dphi_min_deg > 0.0 && b.dphi_min_deg <= b.dphi_max_deg && b.dphi_max_deg <= 90.0))
        throw ValidationError("bounds.dphi_min_deg", "need 0 < min <= max <= 90");
    if (!(b.beta0_max_deg > 0.0 && b.beta0_max_deg <= 90.0))
        throw ValidationError("bounds.beta0_max_deg", "must be in (0, 90]");

    if (cfg.output.formats.empty())
        throw ValidationError("output.formats", "need at least one of csv, json, svg");
    for (const std::string& fmt : cfg.output.formats)
        if (fmt != "csv" && fmt != "json" && fmt != "svg")
            throw ValidationError("output.formats", "unknown format \"" + fmt + "\"");
}

/// Parses and validates a JSON configuration document. Missing fields take
/// their defaults; unknown keys are rejected rather than ignored so typos
/// cannot silently fall back to defaults.
inline RunConfig parse_config(const std::string& text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("config root must be a JSON object");

    detail::reject_unknown_keys(doc, "",
                                {"kite", "environment", "constraints", "shape", "grid_n",
                                 "sweep", "bounds", "output"});

    RunConfig cfg;

    if (doc.contains("kite")) {
        const json& k = doc.at("kite");
        if (!k.is_object()) throw ParseError("'kite' must be an object");
        detail::reject_unknown_keys(k, "kite", {"mass", "area", "c_lift", "c_drag"});
        cfg.kite.mass = detail::get_number(k, "kite.", "mass", cfg.kite.mass);
        cfg.kite.area = detail::get_number(k, "kite.", "area", cfg.kite.area);
        cfg.kite.c_lift = detail::get_number(k, "kite.", "c_lift", cfg.kite.c_lift);
        cfg.kite.c_drag = detail::get_number(k, "kite.", "c_drag", cfg.kite.c_drag);
    }
    if (doc.contains("environment")) {
        const json& e = doc.at("environment");
        if (!e.is_object()) throw ParseError("'environment' must be an object");
        detail::reject_unknown_keys(e, "environment", {"air_density", "wind_speed"});
        cfg.environment.air_density =
            detail::get_number(e, "environment.", "air_density", cfg.environment.air_density);
        cfg.environment.wind_speed =
            detail::get_number(e, "environment.", "wind_speed", cfg.environment.wind_speed);
    }
    if (doc.contains("constraints")) {
        const json& c = doc.at("constraints");
        if (!c.is_object()) throw ParseError("'constraints' must be an object");
        detail::reject_unknown_keys(c, "constraints",
                                    {"phi_max_deg", "h_min", "h_max", "f_tether_max", "p_rated"});
        cfg.constraints.phi_max_deg =
            detail::get_number(c, "constraints.", "phi_max_deg", cfg.constraints.phi_max_deg);
        cfg.constraints.h_min = detail::get_number(c, "constraints.", "h_min", cfg.constraints.h_min);
        cfg.constraints.h_max = detail::get_number(c, "constraints.", "h_max", cfg.constraints.h_max);
        cfg.constraints.f_tether_max =
            detail::get_optional_number(c, "constraints.", "f_tether_max");
        cfg.constraints.p_rated = detail::get_optional_number(c, "constraints.", "p_rated");
    }
    cfg.shape = detail::get_string(doc, "", "shape", cfg.shape);
    cfg.grid_n = detail::get_int(doc, "", "grid_n", cfg.grid_n);
    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        if (!s.is_object()) throw ParseError("'sweep' must be an object");
        detail::reject_unknown_keys(s, "sweep", {"r_min", "r_max", "dr"});
        cfg.sweep.r_min = detail::get_number(s, "sweep.", "r_min", cfg.sweep.r_min);
        cfg.sweep.r_max = detail::get_number(s, "sweep.", "r_max", cfg.sweep.r_max);
        cfg.sweep.dr = detail::get_number(s, "sweep.", "dr", cfg.sweep.dr);
    }
    if (doc.contains("bounds")) {
        const json& b = doc.at("bounds");
        if (!b.is_object()) throw ParseError("'bounds' must be an object");
        detail::reject_unknown_keys(b, "bounds",
                                    {"dbeta_min_deg", "dbeta_max_deg", "dphi_min_deg",
                                     "dphi_max_deg", "beta0_max_deg"});
        cfg.bounds.dbeta_min_deg =
            detail::get_number(b, "bounds.", "dbeta_min_deg", cfg.bounds.dbeta_min_deg);
        cfg.bounds.dbeta_max_deg =
            detail::get_number(b, "bounds.", "dbeta_max_deg", cfg.bounds.dbeta_max_deg);
        cfg.bounds.dphi_min_deg =
            detail::get_number(b, "bounds.", "dphi_min_deg", cfg.bounds.dphi_min_deg);
        cfg.bounds.dphi_max_deg =
            detail::get_number(b, "bounds.", "dphi_max_deg", cfg.bounds.dphi_max_deg);
        cfg.bounds.beta0_max_deg =
            detail::get_number(b, "bounds.", "beta0_max_deg", cfg.bounds.beta0_max_deg);
    }
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        if (!o.is_object()) throw ParseError("'output' must be an object");
        detail::reject_unknown_keys(o, "output", {"directory", "formats"});
        cfg.output.directory = detail::get_string(o, "output.", "directory", cfg.output.directory);
        if (o.contains("formats")) {
            const json& f = o.at("formats");
            if (!f.is_array()) throw ParseError("'output.formats' must be an array of strings");
            cfg.output.formats.clear();
            for (const json& item : f) {
                if (!item.is_string()) throw ParseError("'output.formats' must be an array of strings");
                cfg.output.formats.push_back(item.get<std::string>());
            }
        }
    }

    validate(cfg);
    return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
    nlohmann::ordered_json doc;
    doc["kite"] = {{"mass", cfg.kite.mass},
                   {"area", cfg.kite.area},
                   {"c_lift", cfg.kite.c_lift},
                   {"c_drag", cfg.kite.c_drag}};
    doc["environment"] = {{"air_density", cfg.environment.air_density},
                          {"wind_speed", cfg.environment.wind_speed}};
    nlohmann::ordered_json constraints = {{"phi_max_deg", cfg.constraints.phi_max_deg},
                                          {"h_min", cfg.constraints.h_min},
                                          {"h_max", cfg.constraints.h_max}};
    if (cfg.constraints.f_tether_max) constraints["f_tether_max"] = *cfg.constraints.f_tether_max;
    if (cfg.constraints.p_rated) constraints["p_rated"] = *cfg.constraints.p_rated;
    doc["constraints"] = constraints;
    doc["shape"] = cfg.shape;
    doc["grid_n"] = cfg.grid_n;
    doc["sweep"] = {{"r_min", cfg.sweep.r_min}, {"r_max", cfg.sweep.r_max}, {"dr", cfg.sweep.dr}};
    doc["bounds"] = {{"dbeta_min_deg", cfg.bounds.dbeta_min_deg},
                     {"dbeta_max_deg", cfg.bounds.dbeta_max_deg},
                     {"dphi_min_deg", cfg.bounds.dphi_min_deg},
                     {"dphi_max_deg", cfg.bounds.dphi_max_deg},
                     {"beta0_max_deg", cfg.bounds.beta0_max_deg}};
    doc["output"] = {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}};
    return doc.dump(2) + "\n";
}

}  // namespace kitepath::cli
