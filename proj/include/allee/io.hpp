#pragma once

// JSON (nlohmann) and CSV encodings of the library types. CSV numbers use
// "%.17g", which round-trips binary64 and always uses '.' as separator.

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "allee/dynamics.hpp"
#include "allee/verify.hpp"

namespace allee {

using nlohmann::json;

inline std::string format17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* to_string(Regime r) {
    switch (r) {
    case Regime::BelowThreshold: return "BelowThreshold";
    case Regime::AtThreshold: return "AtThreshold";
    case Regime::AboveThreshold: return "AboveThreshold";
    }
    return "?";
}

inline const char* to_string(FixedPointKind k) {
    switch (k) {
    case FixedPointKind::Origin: return "Origin";
    case FixedPointKind::Double: return "Double";
    case FixedPointKind::Lower: return "Lower";
    case FixedPointKind::Upper: return "Upper";
    }
    return "?";
}

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::ConvergedTo: return "ConvergedTo";
    case Verdict::MaxItersReached: return "MaxItersReached";
    case Verdict::LeftDomain: return "LeftDomain";
    }
    return "?";
}

inline const char* to_string(RegionKind k) {
    switch (k) {
    case RegionKind::Omega: return "Omega";
    case RegionKind::Omega1: return "Omega1";
    case RegionKind::Omega2: return "Omega2";
    case RegionKind::Sub1: return "Sub1";
    case RegionKind::Sub2: return "Sub2";
    case RegionKind::Sub3: return "Sub3";
    case RegionKind::Sub4: return "Sub4";
    }
    return "?";
}

inline void to_json(json& j, const ModelParams& p) {
    j = json{{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"mu", p.mu}, {"d0", p.d0}, {"d1", p.d1}};
}

/// Reads the parameter keys that are present; others keep their value in `p`.
inline void from_json(const json& j, ModelParams& p) {
    auto read = [&j](const char* key, double& field) {
        if (auto it = j.find(key); it != j.end()) field = it->get<double>();
    };
    read("alpha", p.alpha);
    read("beta", p.beta);
    read("gamma", p.gamma);
    read("mu", p.mu);
    read("d0", p.d0);
    read("d1", p.d1);
}

inline void to_json(json& j, const State& z) { j = json{{"x", z.x}, {"y", z.y}}; }
inline void from_json(const json& j, State& z) {
    z.x = j.at("x").get<double>();
    z.y = j.at("y").get<double>();
}

inline void to_json(json& j, const Box& b) {
    j = json{{"x_lo", b.x_lo}, {"x_hi", b.x_hi}, {"y_lo", b.y_lo}, {"y_hi", b.y_hi}};
}

inline void to_json(json& j, const ExistenceReport& r) {
    j = json{{"nu", r.nu}, {"discriminant", r.discriminant}, {"regime", to_string(r.regime)}};
}

inline void to_json(json& j, const FixedPoint& fp) {
    j = json{{"point", fp.point}, {"residual", fp.residual}, {"kind", to_string(fp.kind)}};
}

inline json complex_json(const std::complex<double>& c) {
    return json{{"re", c.real()}, {"im", c.imag()}, {"modulus", std::abs(c)}};
}

inline void to_json(json& j, const QuadraticCoeffs& q) { j = json{{"B", q.B}, {"C", q.C}}; }

inline void to_json(json& j, const RootClass& rc) {
    j = json{{"case_tag", case_label(rc)},
             {"lambda1", complex_json(rc.lambda1)},
             {"lambda2", complex_json(rc.lambda2)},
             {"real", rc.real()}};
}

inline void to_json(json& j, const StabilityReport& r) {
    j = json{{"coeffs", r.coeffs},
             {"f_at_1", r.f_at_1},
             {"f_at_minus1", r.f_at_minus1},
             {"roots", r.roots},
             {"fp_type", to_string(r.fp_type)},
             {"semi_attracting", r.semi_attracting},
             {"jacobian_eigenvalues",
              json::array({complex_json(r.jacobian_eigenvalues[0]), complex_json(r.jacobian_eigenvalues[1])})},
             {"oracle_deviation", r.oracle_deviation},
             {"notes", r.notes}};
}

/// Verdict and summary; the points go to CSV.
inline void to_json(json& j, const Trajectory& t) {
    j = json{{"verdict", to_string(t.verdict)},
             {"last", t.last},
             {"iterations_used", t.iterations_used},
             {"last_step", t.last_step},
             {"error_estimate", t.error_estimate}};
    if (t.verdict == Verdict::ConvergedTo) j["limit"] = t.last;
}

inline void to_json(json& j, const RegionSpec& r) {
    j = json{{"kind", to_string(r.kind)}, {"bounds", r.bounds}, {"excluded", r.excluded}};
}

inline void to_json(json& j, const CornerCertificate& c) {
    j = json{{"box", c.box},
             {"lower_corner_limit", c.lower_corner_limit},
             {"upper_corner_limit", c.upper_corner_limit},
             {"lower_converged", c.lower_converged},
             {"upper_converged", c.upper_converged},
             {"certified", c.certified},
             {"common_limit", c.common_limit ? json(*c.common_limit) : json(nullptr)},
             {"iterations", c.iterations},
             {"gap", c.gap}};
}

inline void to_json(json& j, const TrajectoryOptions& o) {
    j = json{{"max_iters", o.max_iters}, {"tol", o.tol}};
}

inline void to_json(json& j, const SuiteResult& s) {
    j = json{{"name", s.name},     {"ran", s.ran},         {"passed", s.passed}, {"samples", s.samples},
             {"seed", s.seed},     {"witness", s.witness}, {"detail", s.detail}};
    if (!s.warning.empty()) j["warning"] = s.warning;
}

inline void to_json(json& j, const VerifyReport& r) {
    j = json{{"params", r.params},
             {"seed", r.options.seed},
             {"budgets",
              {{"quadrant_samples", r.options.quadrant_samples},
               {"absorption_starts", r.options.absorption_starts},
               {"absorption_budget", r.options.absorption_budget},
               {"absorption_tail", r.options.absorption_tail},
               {"invariance_samples", r.options.invariance_samples},
               {"cooperative_pairs", r.options.cooperative_pairs}}},
             {"suites", r.suites},
             {"all_passed", r.all_passed()}};
}

inline void to_json(json& j, const ExampleTable& t) {
    json rows = json::array();
    for (const auto& row : t.rows)
        rows.push_back({{"z0", row.z0},
                        {"expected", row.expected},
                        {"run", row.run},
                        {"distance", row.distance},
                        {"reached", row.reached}});
    j = json{{"example_id", t.example_id}, {"params", t.params}, {"budget", t.budget},
             {"accuracy", t.accuracy},     {"rows", rows}};
}

/// Grid geometry, attractor legend and budgets for a raster CSV.
inline json raster_sidecar(const BasinRaster& r, std::uint64_t seed, const ModelParams& p) {
    json attractors = json::array();
    for (std::size_t i = 0; i < r.attractors.size(); ++i)
        attractors.push_back({{"label", i}, {"fixed_point", r.attractors[i]}});
    json counts = json::object();
    counts["undecided"] = r.count(BasinRaster::kUndecided);
    for (std::size_t i = 0; i < r.attractors.size(); ++i) counts[std::to_string(i)] = r.count(static_cast<int>(i));
    return json{{"params", p},
                {"box", r.box},
                {"nx", r.nx},
                {"ny", r.ny},
                {"cell_centers", "x = x_lo + (i + 0.5) * (x_hi - x_lo) / nx, likewise y"},
                {"undecided_label", BasinRaster::kUndecided},
                {"attractors", attractors},
                {"budget", r.budget},
                {"seed", seed},
                {"counts", counts}};
}

// --------------------------------------------------------------------------- CSV

inline void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
    os << "n,x,y\n";
    for (std::size_t k = 0; k < t.points.size(); ++k) {
        const std::size_t n = (k + 1 == t.points.size() && k > 0) ? t.iterations_used : k * t.stride;
        os << n << ',' << format17(t.points[k].x) << ',' << format17(t.points[k].y) << '\n';
    }
}

inline void write_raster_csv(std::ostream& os, const BasinRaster& r) {
    os << "x,y,label\n";
    for (std::size_t j = 0; j < r.ny; ++j)
        for (std::size_t i = 0; i < r.nx; ++i) {
            const State c = r.cell_center(i, j);
            os << format17(c.x) << ',' << format17(c.y) << ',' << r.label(i, j) << '\n';
        }
}

}  // namespace allee
