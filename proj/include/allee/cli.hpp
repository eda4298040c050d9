#pragma once

// Command-line front end. Exit codes: 0 success, 1 analysis-negative (not
// certified, property failed), 2 usage or validation error.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "allee/io.hpp"

namespace allee::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::optional<double> alpha, beta, gamma, mu, d0, d1;
    std::optional<double> tol;
    std::optional<std::size_t> max_iters;
    std::uint64_t seed = kDefaultSeed;
    std::string grid = "200,200";
    std::string box;  // empty: absorbing box
    std::string format;  // empty: json, or csv for sweep
    std::string out;
    std::string config;

    // per-command
    std::optional<double> x0, y0;
    std::size_t stride = 1;
    std::string beta_range;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> samples;
};

inline std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        const char* first = item.data();
        const char* last = item.data() + item.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) throw UsageError(std::string(flag) + ": cannot parse '" + item + "'");
        out.push_back(v);
    }
    if (out.size() != expected)
        throw UsageError(std::string(flag) + ": expected " + std::to_string(expected) + " comma-separated values");
    return out;
}

/// Merges the JSON config (if any) under the explicit flags.
inline void merge_config(RunConfig& c) {
    if (c.config.empty()) return;
    std::ifstream in(c.config);
    if (!in) throw UsageError("cannot open config file " + c.config);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    auto fill = [&j](const char* key, std::optional<double>& slot) {
        if (slot || !j.contains(key)) return;
        if (!j[key].is_number()) throw UsageError(std::string("config key '") + key + "' must be a number");
        slot = j[key].get<double>();
    };
    fill("alpha", c.alpha);
    fill("beta", c.beta);
    fill("gamma", c.gamma);
    fill("mu", c.mu);
    fill("d0", c.d0);
    fill("d1", c.d1);
    fill("tol", c.tol);
    if (!c.max_iters && j.contains("max_iters")) {
        if (!j["max_iters"].is_number_unsigned()) throw UsageError("config key 'max_iters' must be a positive integer");
        c.max_iters = j["max_iters"].get<std::size_t>();
    }
}

inline ModelParams require_params(const RunConfig& c, bool need_beta = true) {
    auto need = [](const std::optional<double>& v, const char* name) {
        if (!v) throw UsageError(std::string("missing required parameter --") + name);
        return *v;
    };
    ModelParams p;
    p.alpha = need(c.alpha, "alpha");
    p.beta = need_beta ? need(c.beta, "beta") : c.beta.value_or(1.0);
    p.gamma = need(c.gamma, "gamma");
    p.mu = need(c.mu, "mu");
    p.d0 = need(c.d0, "d0");
    p.d1 = c.d1.value_or(0.0);
    return p;
}

inline Box resolve_box(const RunConfig& c, const ModelParams& p) {
    if (c.box.empty()) return omega(p);
    const auto v = parse_list(c.box, 4, "--box");
    return {v[0], v[1], v[2], v[3]};
}

inline void emit_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

/// Writes to --out when set, otherwise to `fallback`.
template <typename Writer>
void write_output(const RunConfig& c, std::ostream& fallback, Writer&& writer) {
    if (c.out.empty()) {
        writer(fallback);
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw UsageError("cannot open output file " + c.out);
    writer(f);
}

inline std::string params_comment(const ModelParams& p) {
    return "# alpha=" + format17(p.alpha) + " beta=" + format17(p.beta) + " gamma=" + format17(p.gamma) +
           " mu=" + format17(p.mu) + " d0=" + format17(p.d0) + " d1=" + format17(p.d1);
}

// --------------------------------------------------------------------------- commands

inline json fixed_point_entry(const ModelParams& p, const FixedPoint& fp) {
    json e = fp;
    e["stability"] = classify_fixed_point(p, fp);
    return e;
}

inline int cmd_fixed_points(const RunConfig& c, std::ostream& out) {
    const ModelParams p = validate_params(require_params(c));
    const ExistenceReport rep = existence_report(p);
    const auto fps = fixed_points(p);
    if (c.format == "csv") {
        write_output(c, out, [&](std::ostream& os) {
            os << params_comment(p) << '\n' << "kind,x,y,residual,fp_type,case_tag\n";
            for (const auto& fp : fps) {
                const StabilityReport s = classify_fixed_point(p, fp);
                os << to_string(fp.kind) << ',' << format17(fp.point.x) << ',' << format17(fp.point.y) << ','
                   << format17(fp.residual) << ',' << to_string(s.fp_type) << ',' << case_label(s.roots) << '\n';
            }
        });
        return kExitOk;
    }
    json j{{"command", "fixed-points"},
           {"params", p},
           {"threshold_tol", kDefaultThresholdTol},
           {"unit_circle_eps", kUnitCircleEps},
           {"existence", rep},
           {"omega", omega(p)}};
    j["fixed_points"] = json::array();
    for (const auto& fp : fps) j["fixed_points"].push_back(fixed_point_entry(p, fp));
    write_output(c, out, [&](std::ostream& os) { emit_json(os, j); });
    return kExitOk;
}

inline TrajectoryOptions trajectory_budget(const RunConfig& c, const ModelParams& p) {
    TrajectoryOptions opt;
    if (p.d1 == 0.0) opt = default_trajectory_options(existence_report(p).regime);
    if (c.tol) opt.tol = *c.tol;
    if (c.max_iters) opt.max_iters = *c.max_iters;
    opt.stride = std::max<std::size_t>(c.stride, 1);
    return opt;
}

inline int cmd_trajectory(const RunConfig& c, std::ostream& out) {
    const ModelParams p = validate_params(require_params(c), Validation::General);
    if (!c.x0 || !c.y0) throw UsageError("trajectory needs --x0 and --y0");
    if (!(*c.x0 >= 0.0) || !(*c.y0 >= 0.0)) throw UsageError("initial state must be nonnegative");
    const TrajectoryOptions opt = trajectory_budget(c, p);
    const Trajectory t = trajectory(p, {*c.x0, *c.y0}, opt);

    if (c.format == "csv" && c.out.empty()) {
        out << params_comment(p) << '\n';
        write_trajectory_csv(out, t);
        return kExitOk;
    }
    if (!c.out.empty()) {
        write_output(c, out, [&](std::ostream& os) {
            os << params_comment(p) << '\n';
            write_trajectory_csv(os, t);
        });
    }
    json j{{"command", "trajectory"}, {"params", p}, {"z0", State{*c.x0, *c.y0}}, {"budget", opt},
           {"seed", c.seed},          {"result", t}};
    if (p.d1 == 0.0) {
        if (const auto m = match_attractor(t, fixed_points(p), opt.tol)) j["fixed_point"] = fixed_points(p)[*m];
    }
    if (!c.out.empty()) j["csv"] = c.out;
    emit_json(out, j);
    return kExitOk;
}

inline std::string sidecar_path(const std::string& csv_path) {
    std::filesystem::path path(csv_path);
    if (path.extension() == ".csv") return path.replace_extension(".json").string();
    return csv_path + ".json";
}

inline int cmd_basin(const RunConfig& c, std::ostream& out) {
    const ModelParams p = validate_params(require_params(c));
    const auto g = parse_list(c.grid, 2, "--grid");
    if (!(g[0] >= 1.0 && g[1] >= 1.0) || g[0] != std::floor(g[0]) || g[1] != std::floor(g[1]))
        throw UsageError("--grid needs two positive integers");
    const Box box = resolve_box(c, p);
    if (!box.well_formed()) throw UsageError("--box must satisfy 0 <= x0 <= x1 and 0 <= y0 <= y1");
    TrajectoryOptions opt = trajectory_budget(c, p);
    const BasinRaster r = basin_raster(p, box, static_cast<std::size_t>(g[0]), static_cast<std::size_t>(g[1]), opt);

    const std::string csv = c.out.empty() ? "basin.csv" : c.out;
    const std::string side = sidecar_path(csv);
    {
        std::ofstream f(csv);
        if (!f) throw UsageError("cannot open output file " + csv);
        write_raster_csv(f, r);
    }
    json meta = raster_sidecar(r, c.seed, p);
    {
        std::ofstream f(side);
        if (!f) throw UsageError("cannot open output file " + side);
        emit_json(f, meta);
    }
    meta["command"] = "basin";
    meta["csv"] = csv;
    meta["sidecar"] = side;
    emit_json(out, meta);
    return kExitOk;
}

inline int cmd_certify(const RunConfig& c, std::ostream& out) {
    const ModelParams p = validate_params(require_params(c));
    const Box box = resolve_box(c, p);
    CornerOptions opt;
    if (c.tol) opt.tol = *c.tol;
    if (c.max_iters) opt.max_iters = *c.max_iters;
    json j{{"command", "certify"},
           {"params", p},
           {"box", box},
           {"budget", {{"max_iters", opt.max_iters}, {"tol", opt.tol}}},
           {"seed", c.seed}};
    try {
        j["certificate"] = corner_certificate(p, box, opt);
    } catch (const InvalidBox& e) {
        throw UsageError(e.what());
    } catch (const NotInvariant& e) {
        j["certificate"] = nullptr;
        j["certified"] = false;
        j["reason"] = "NotInvariant";
        j["message"] = e.what();
        emit_json(out, j);
        return kExitNegative;
    } catch (const MonotonicityViolated& e) {
        j["certificate"] = nullptr;
        j["certified"] = false;
        j["reason"] = "MonotonicityViolated";
        j["message"] = e.what();
        emit_json(out, j);
        return kExitNegative;
    }
    const bool ok = j["certificate"]["certified"].get<bool>();
    j["certified"] = ok;
    emit_json(out, j);
    return ok ? kExitOk : kExitNegative;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& out) {
    ModelParams base = require_params(c, false);
    if (c.beta_range.empty()) throw UsageError("sweep needs --beta-range lo,hi");
    const bool as_json = c.format == "json";
    if (!c.steps || *c.steps == 0) throw UsageError("sweep needs --steps >= 1");
    const auto range = parse_list(c.beta_range, 2, "--beta-range");
    if (!(range[0] > 0.0) || !(range[0] <= range[1])) throw UsageError("--beta-range must satisfy 0 < lo <= hi");
    base.beta = range[0];
    validate_params(base);

    struct Row {
        double beta;
        ExistenceReport rep;
        std::vector<std::pair<FixedPoint, StabilityReport>> fps;
    };
    std::vector<Row> rows;
    const std::size_t n = *c.steps;
    for (std::size_t k = 0; k < n; ++k) {
        ModelParams p = base;
        p.beta = n == 1 ? range[0]
                        : range[0] + (range[1] - range[0]) * static_cast<double>(k) / static_cast<double>(n - 1);
        Row row{p.beta, existence_report(p), {}};
        for (const auto& fp : fixed_points(p)) row.fps.emplace_back(fp, classify_fixed_point(p, fp));
        rows.push_back(std::move(row));
    }

    if (as_json) {
        json arr = json::array();
        for (const auto& r : rows) {
            json fps = json::array();
            for (const auto& [fp, s] : r.fps) {
                json e = fp;
                e["fp_type"] = to_string(s.fp_type);
                fps.push_back(e);
            }
            arr.push_back({{"beta", r.beta}, {"existence", r.rep}, {"fixed_points", fps}});
        }
        json j{{"command", "sweep"}, {"params", base}, {"threshold_tol", kDefaultThresholdTol}, {"rows", arr}};
        write_output(c, out, [&](std::ostream& os) { emit_json(os, j); });
        return kExitOk;
    }
    write_output(c, out, [&](std::ostream& os) {
        os << params_comment(base) << " threshold_tol=" << format17(kDefaultThresholdTol) << '\n';
        os << "beta,nu,discriminant,regime,origin_type,x_lower,y_lower,type_lower,x_upper,y_upper,type_upper\n";
        for (const auto& r : rows) {
            os << format17(r.beta) << ',' << format17(r.rep.nu) << ',' << format17(r.rep.discriminant) << ','
               << to_string(r.rep.regime) << ',' << to_string(r.fps[0].second.fp_type);
            for (std::size_t i = 1; i <= 2; ++i) {
                if (i < r.fps.size())
                    os << ',' << format17(r.fps[i].first.point.x) << ',' << format17(r.fps[i].first.point.y) << ','
                       << to_string(r.fps[i].second.fp_type);
                else
                    os << ",,,";
            }
            os << '\n';
        }
    });
    return kExitOk;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const ModelParams p = validate_params(require_params(c));
    VerifyOptions opt = c.samples ? VerifyOptions::uniform(*c.samples, c.seed) : VerifyOptions{};
    opt.seed = c.seed;
    if (c.max_iters) opt.absorption_budget = *c.max_iters;
    const VerifyReport rep = verify_properties(p, opt);
    json j = rep;
    j["command"] = "verify";
    for (const auto& s : rep.suites) {
        if (!s.warning.empty()) {
            err << "warning: " << s.name << ": " << s.warning << '\n';
        }
        if (!s.passed) {
            err << "property failed: " << s.name << ": " << s.detail;
            for (const auto& w : s.witness) err << " (" << format17(w.x) << ", " << format17(w.y) << ")";
            err << '\n';
        }
    }
    write_output(c, out, [&](std::ostream& os) { emit_json(os, j); });
    return rep.all_passed() ? kExitOk : kExitNegative;
}

// --------------------------------------------------------------------------- entry point

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fixed points, stability and global dynamics of a discrete mosquito map with an Allee effect",
                 "allee"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig c;
    app.add_option("--alpha", c.alpha, "maximum emergence rate");
    app.add_option("--beta", c.beta, "birth rate");
    app.add_option("--gamma", c.gamma, "Allee constant");
    app.add_option("--mu", c.mu, "adult death rate");
    app.add_option("--d0", c.d0, "linear larvae death rate");
    app.add_option("--d1", c.d1, "quadratic larvae death coefficient (general map only)");
    app.add_option("--tol", c.tol, "convergence tolerance");
    app.add_option("--max-iters", c.max_iters, "iteration budget");
    app.add_option("--grid", c.grid, "raster size NX,NY");
    app.add_option("--seed", c.seed, "seed for the quasi-random samplers");
    app.add_option("--box", c.box, "rectangle x0,x1,y0,y1 (default: absorbing box)");
    app.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", c.out, "output path");
    app.add_option("--config", c.config, "JSON file with parameter defaults");

    auto* fixed = app.add_subcommand("fixed-points", "existence regime, fixed points and their stability");
    auto* traj = app.add_subcommand("trajectory", "iterate the map from one initial state");
    traj->add_option("--x0", c.x0, "initial larvae");
    traj->add_option("--y0", c.y0, "initial adults");
    traj->add_option("--stride", c.stride, "keep every n-th iterate in the CSV");
    auto* basin = app.add_subcommand("basin", "rasterize basins of attraction");
    auto* certify = app.add_subcommand("certify", "corner-iteration convergence certificate for a box");
    auto* sweep = app.add_subcommand("sweep", "fixed points and types across a beta range");
    sweep->add_option("--beta-range", c.beta_range, "lo,hi");
    sweep->add_option("--steps", c.steps, "number of beta values");
    auto* verify = app.add_subcommand("verify", "run the property suites");
    verify->add_option("--samples", c.samples, "sample count for every suite");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    try {
        merge_config(c);
        if (fixed->parsed()) return cmd_fixed_points(c, out);
        if (traj->parsed()) return cmd_trajectory(c, out);
        if (basin->parsed()) return cmd_basin(c, out);
        if (certify->parsed()) return cmd_certify(c, out);
        if (sweep->parsed()) return cmd_sweep(c, out);
        if (verify->parsed()) return cmd_verify(c, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParameterOutOfRange& e) {
        err << "invalid parameters: violated condition " << e.condition() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace allee::cli
