#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kitepath/config.hpp"
#include "kitepath/geometry.hpp"
#include "kitepath/model.hpp"
#include "kitepath/optimizer.hpp"
#include "kitepath/output.hpp"
#include "kitepath/svg.hpp"
#include "kitepath/sweep.hpp"

namespace kitepath::cli {

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

inline bool wants(const std::vector<std::string>& formats, const char* fmt) {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

}  // namespace detail

/// Output directory precedence: --out flag, then KITEPATH_OUT, then the
/// config file's output.directory (default ".").
inline std::string resolve_out_dir(const std::optional<std::string>& flag,
                                   const RunConfig& cfg) {
    if (flag) return *flag;
    if (const char* env = std::getenv("KITEPATH_OUT"); env != nullptr && *env != '\0')
        return env;
    return cfg.output.directory;
}

struct EvaluateReport {
    double r_m = 0.0;
    double beta0_rad = 0.0;
    double dbeta_rad = 0.0;
    double dphi_rad = 0.0;
    double p_avg_w = 0.0;
    double p_loyd_w = 0.0;
    double loyd_ratio = 0.0;
    double max_kappa = 0.0;     // 1/m, worst total curvature over the cycle
    double max_roll_rad = 0.0;  // worst required roll over the cycle
};

/// Flies the given fixed path through the quasi-static model. Strict roll
/// conversion: a path demanding more turning lift than the wing has is an
/// error naming the offending parameter value, not a silent clamp.
inline EvaluateReport cmd_evaluate(const RunConfig& cfg, const LissajousPath& path, double r) {
    kitepath::validate(path);
    const std::vector<PathSample> samples = geometry::sample_path(path, r, cfg.grid_n);

    EvaluateReport rep;
    rep.r_m = r;
    rep.beta0_rad = path.beta0;
    rep.dbeta_rad = path.dbeta;
    rep.dphi_rad = path.dphi;
    rep.p_avg_w = model::average_power(samples, cfg.environment, cfg.kite);
    rep.p_loyd_w = model::loyd_power(cfg.environment, cfg.kite);
    rep.loyd_ratio = rep.p_avg_w / rep.p_loyd_w;
    for (const PathSample& smp : samples) {
        rep.max_kappa = std::max(rep.max_kappa, smp.kappa_total);
        rep.max_roll_rad = std::max(
            rep.max_roll_rad, model::roll_angle(smp.kappa_geo, cfg.kite, cfg.environment));
    }
    return rep;
}

inline constexpr const char* kEvaluateHeader =
    "r_m,beta0_rad,dbeta_rad,dphi_rad,p_avg_w,p_loyd_w,loyd_ratio,max_kappa,max_roll_rad";

inline std::string evaluate_csv(const EvaluateReport& rep) {
    std::string out = kEvaluateHeader;
    out += '\n';
    out += format_number(rep.r_m) + ',' + format_number(rep.beta0_rad) + ',' +
           format_number(rep.dbeta_rad) + ',' + format_number(rep.dphi_rad) + ',' +
           format_number(rep.p_avg_w) + ',' + format_number(rep.p_loyd_w) + ',' +
           format_number(rep.loyd_ratio) + ',' + format_number(rep.max_kappa) + ',' +
           format_number(rep.max_roll_rad) + '\n';
    return out;
}

inline nlohmann::ordered_json evaluate_json(const EvaluateReport& rep) {
    nlohmann::ordered_json doc;
    doc["r_m"] = rounded(rep.r_m);
    doc["beta0_rad"] = rounded(rep.beta0_rad);
    doc["dbeta_rad"] = rounded(rep.dbeta_rad);
    doc["dphi_rad"] = rounded(rep.dphi_rad);
    doc["p_avg_w"] = rounded(rep.p_avg_w);
    doc["p_loyd_w"] = rounded(rep.p_loyd_w);
    doc["loyd_ratio"] = rounded(rep.loyd_ratio);
    doc["max_kappa"] = rounded(rep.max_kappa);
    doc["max_roll_rad"] = rounded(rep.max_roll_rad);
    return doc;
}

inline optimizer::PlanSolution cmd_optimize(const RunConfig& cfg, double r) {
    return optimizer::multi_start(optimizer::build_problem(r, cfg));
}

/// Writes the sweep artifacts for a (possibly partial) result: sweep.csv
/// always, sweep.json when requested, splines.json when there are enough
/// points to fit, plots when requested.
inline void write_sweep_files(const sweep::SweepResult& res, const RunConfig& cfg,
                              const std::filesystem::path& dir,
                              const std::vector<std::string>& formats) {
    const std::vector<OutputRecord> records = make_records(res, cfg.environment, cfg.kite);
    detail::write_file(dir / "sweep.csv", to_csv(records));
    if (detail::wants(formats, "json"))
        detail::write_file(dir / "sweep.json", to_json(records).dump(2) + "\n");
    if (res.grid.size() >= 4)
        detail::write_file(dir / "splines.json",
                           splines_to_json(sweep::fit_splines(res)).dump(2) + "\n");
    if (detail::wants(formats, "svg") && !records.empty()) {
        detail::write_file(dir / "power_vs_r.svg", power_vs_r_svg(records));
        detail::write_file(dir / "params_vs_r.svg", params_vs_r_svg(records));
        detail::write_file(dir / "paths_plane.svg", paths_plane_svg(res));
        detail::write_file(dir / "paths_3d.svg", paths_3d_svg(res));
    }
}

struct PhaseAverageReport {
    double r_lo_m = 0.0;
    double r_hi_m = 0.0;
    double p_avg_w = 0.0;
    double p_loyd_w = 0.0;
    double loyd_ratio = 0.0;
};

inline PhaseAverageReport cmd_phase_average(const RunConfig& cfg, double r_lo, double r_hi) {
    const sweep::SweepResult res = sweep::run_sweep(cfg);
    PhaseAverageReport rep;
    rep.r_lo_m = r_lo;
    rep.r_hi_m = r_hi;
    rep.p_avg_w = sweep::phase_average(res, r_lo, r_hi, cfg.environment, cfg.kite);
    rep.p_loyd_w = model::loyd_power(cfg.environment, cfg.kite);
    rep.loyd_ratio = rep.p_avg_w / rep.p_loyd_w;
    return rep;
}

inline constexpr const char* kPhaseAverageHeader = "r_lo_m,r_hi_m,p_avg_w,p_loyd_w,loyd_ratio";

inline std::string phase_average_csv(const PhaseAverageReport& rep) {
    std::string out = kPhaseAverageHeader;
    out += '\n';
    out += format_number(rep.r_lo_m) + ',' + format_number(rep.r_hi_m) + ',' +
           format_number(rep.p_avg_w) + ',' + format_number(rep.p_loyd_w) + ',' +
           format_number(rep.loyd_ratio) + '\n';
    return out;
}

inline nlohmann::ordered_json phase_average_json(const PhaseAverageReport& rep) {
    nlohmann::ordered_json doc;
    doc["r_lo_m"] = rounded(rep.r_lo_m);
    doc["r_hi_m"] = rounded(rep.r_hi_m);
    doc["p_avg_w"] = rounded(rep.p_avg_w);
    doc["p_loyd_w"] = rounded(rep.p_loyd_w);
    doc["loyd_ratio"] = rounded(rep.loyd_ratio);
    return doc;
}

namespace detail {

/// Exit codes: 0 success, 1 usage/config error, 2 domain infeasibility,
/// 3 solver non-convergence (partial artifacts already written).
enum ExitCode : int { kOk = 0, kUsage = 1, kInfeasible = 2, kNoConvergence = 3 };

struct CliArgs {
    std::string command;
    std::string config_path;
    std::optional<std::string> shape;
    std::optional<double> r;
    std::optional<double> r_lo;
    std::optional<double> r_hi;
    double beta0_deg = 0.0;
    double dbeta_deg = 0.0;
    double dphi_deg = 0.0;
    bool plots = false;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
};

inline RunConfig load_config(const CliArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg = parse_config(read_file(args.config_path));
    if (args.shape) cfg.shape = *args.shape;
    if (args.format) cfg.output.formats = {*args.format};
    if (args.plots && !wants(cfg.output.formats, "svg")) cfg.output.formats.push_back("svg");
    validate(cfg);
    return cfg;
}

inline void print_kv(std::ostream& out, const char* key, const std::string& value) {
    out << "  " << key << " = " << value << "\n";
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    detail::CliArgs args;

    CLI::App app{"Curvature-constrained crosswind path planning for a pumping kite"};
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path, "JSON configuration file");
        cmd->add_option("--shape", args.shape, "path shape")
            ->check(CLI::IsMember({"ellipse", "eight"}));
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_option("--format", args.format, "report format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_flag("--plots", args.plots, "also write SVG plots");
    };

    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Fly a fixed path through the power model and report");
    add_common(evaluate);
    evaluate->add_option("--beta0-deg", args.beta0_deg, "central elevation [deg]")->required();
    evaluate->add_option("--dbeta-deg", args.dbeta_deg, "elevation half-range [deg]")->required();
    evaluate->add_option("--dphi-deg", args.dphi_deg, "azimuth half-range [deg]")->required();
    evaluate->add_option("--r", args.r, "tether length [m]");

    CLI::App* optimize =
        app.add_subcommand("optimize", "Optimize the path at one tether length");
    add_common(optimize);
    optimize->add_option("--r", args.r, "tether length [m]");

    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Optimize over the configured tether-length grid and write artifacts");
    add_common(sweep_cmd);

    CLI::App* phase = app.add_subcommand(
        "phase-average", "Mean power over a tether-length interval of the sweep");
    add_common(phase);
    phase->add_option("--r-lo", args.r_lo, "interval start [m]");
    phase->add_option("--r-hi", args.r_hi, "interval end [m]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 picks the stream and the code; --help lands here with code 0.
        const int code = app.exit(e, out, err);
        return code == 0 ? detail::kOk : detail::kUsage;
    }
    args.command = app.get_subcommands().front()->get_name();

    try {
        const RunConfig cfg = detail::load_config(args);
        const std::filesystem::path dir = resolve_out_dir(args.out_dir, cfg);
        std::filesystem::create_directories(dir);
        const std::vector<std::string>& formats = cfg.output.formats;
        constexpr double kDegToRad = geometry::kPi / 180.0;

        if (args.command == "evaluate") {
            LissajousPath path;
            path.beta0 = args.beta0_deg * kDegToRad;
            path.dbeta = args.dbeta_deg * kDegToRad;
            path.dphi = args.dphi_deg * kDegToRad;
            path.n_beta = cfg.shape_n_beta();
            path.n_phi = cfg.shape_n_phi();
            const double r = args.r.value_or(cfg.sweep.r_min);
            const EvaluateReport rep = cmd_evaluate(cfg, path, r);
            if (detail::wants(formats, "csv"))
                detail::write_file(dir / "evaluate.csv", evaluate_csv(rep));
            if (detail::wants(formats, "json"))
                detail::write_file(dir / "evaluate.json", evaluate_json(rep).dump(2) + "\n");
            out << "evaluate: " << cfg.shape << " path at r = " << format_number(rep.r_m)
                << " m\n";
            detail::print_kv(out, "p_avg_w", format_number(rep.p_avg_w));
            detail::print_kv(out, "p_loyd_w", format_number(rep.p_loyd_w));
            detail::print_kv(out, "loyd_ratio", format_number(rep.loyd_ratio));
            detail::print_kv(out, "max_kappa", format_number(rep.max_kappa));
            detail::print_kv(out, "max_roll_rad", format_number(rep.max_roll_rad));
            return detail::kOk;
        }

        if (args.command == "optimize") {
            const double r = args.r.value_or(cfg.sweep.r_min);
            const optimizer::PlanSolution sol = cmd_optimize(cfg, r);
            const OutputRecord rec =
                make_record(r, sol, model::loyd_power(cfg.environment, cfg.kite));
            if (detail::wants(formats, "csv"))
                detail::write_file(dir / "optimize.csv", to_csv({rec}));
            if (detail::wants(formats, "json"))
                detail::write_file(dir / "optimize.json", to_json({rec}).dump(2) + "\n");
            out << "optimize: " << cfg.shape << " path at r = " << format_number(r) << " m\n";
            detail::print_kv(out, "beta0_rad", format_number(rec.beta0_rad));
            detail::print_kv(out, "dbeta_rad", format_number(rec.dbeta_rad));
            detail::print_kv(out, "dphi_rad", format_number(rec.dphi_rad));
            detail::print_kv(out, "p_avg_w", format_number(rec.p_avg_w));
            detail::print_kv(out, "loyd_ratio", format_number(rec.loyd_ratio));
            detail::print_kv(out, "active", join_labels(rec.active_constraints));
            return detail::kOk;
        }

        if (args.command == "sweep") {
            sweep::SweepResult res;
            try {
                res = sweep::run_sweep(cfg);
            } catch (const sweep::SweepAborted& e) {
                write_sweep_files(e.partial(), cfg, dir, formats);
                err << "error: " << e.what() << "\n";
                err << "partial results for " << e.partial().grid.size()
                    << " tether lengths written to " << dir.string() << "\n";
                return detail::kNoConvergence;
            }
            write_sweep_files(res, cfg, dir, formats);
            out << "sweep: " << res.grid.size() << " tether lengths, " << cfg.shape
                << " shape, artifacts in " << dir.string() << "\n";
            detail::print_kv(out, "r_first_ratio",
                             format_number(res.solutions.front().loyd_ratio));
            detail::print_kv(out, "r_last_ratio",
                             format_number(res.solutions.back().loyd_ratio));
            return detail::kOk;
        }

        // phase-average
        const double r_lo = args.r_lo.value_or(cfg.sweep.r_min);
        const double r_hi = args.r_hi.value_or(cfg.sweep.r_max);
        const PhaseAverageReport rep = cmd_phase_average(cfg, r_lo, r_hi);
        if (detail::wants(formats, "csv"))
            detail::write_file(dir / "phase_average.csv", phase_average_csv(rep));
        if (detail::wants(formats, "json"))
            detail::write_file(dir / "phase_average.json",
                               phase_average_json(rep).dump(2) + "\n");
        out << "phase-average over [" << format_number(rep.r_lo_m) << ", "
            << format_number(rep.r_hi_m) << "] m\n";
        detail::print_kv(out, "p_avg_w", format_number(rep.p_avg_w));
        detail::print_kv(out, "loyd_ratio", format_number(rep.loyd_ratio));
        return detail::kOk;
    } catch (const sweep::SweepAborted& e) {
        // From phase-average's internal sweep; no partial artifacts there.
        err << "error: " << e.what() << "\n";
        return detail::kNoConvergence;
    } catch (const NoConvergedSolution& e) {
        err << "error: " << e.what() << "\n";
        return detail::kNoConvergence;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return detail::kUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return detail::kUsage;
    } catch (const Error& e) {
        // Remaining library errors are domain infeasibilities (curvature,
        // altitude band, spline domain, ...).
        err << "error: " << e.what() << "\n";
        return detail::kInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return detail::kUsage;
    }
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace kitepath::cli
