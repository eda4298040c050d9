#pragma once

// Bundled property suites: quadrant invariance, absorption into the absorbing
// box, invariance of the order-interval regions, and cooperativity.

#include <cstdint>
#include <string>
#include <vector>

#include "allee/dynamics.hpp"

namespace allee {

struct VerifyOptions {
    std::size_t quadrant_samples = 100'000;
    double quadrant_extent = 100.0;
    std::size_t absorption_starts = 1'000;
    double absorption_extent = 50.0;
    std::size_t absorption_budget = 100'000;
    std::size_t absorption_tail = 1'000;
    std::size_t invariance_samples = 10'000;
    std::size_t cooperative_pairs = 10'000;
    std::uint64_t seed = kDefaultSeed;
    std::size_t workers = default_workers();

    /// Same count for every suite.
    static VerifyOptions uniform(std::size_t n, std::uint64_t seed = kDefaultSeed) {
        VerifyOptions o;
        o.quadrant_samples = o.absorption_starts = o.invariance_samples = o.cooperative_pairs = n;
        o.seed = seed;
        return o;
    }
};

struct SuiteResult {
    std::string name;
    bool ran = true;
    bool passed = true;
    std::size_t samples = 0;
    std::uint64_t seed = kDefaultSeed;
    std::vector<State> witness;  // offending point(s) followed by their image(s)
    std::string detail;
    std::string warning;
};

struct VerifyReport {
    ModelParams params;
    VerifyOptions options;
    std::vector<SuiteResult> suites;

    bool all_passed() const {
        return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
    }
};

namespace detail {

inline void mark_vacuous(SuiteResult& s) {
    if (s.samples == 0) s.warning = "no samples drawn; pass is vacuous";
}

}  // namespace detail

/// Quadrant invariance on states in [0, extent]^2. The coordinates are the
/// squares of low-discrepancy points, which concentrates samples near the
/// axes where a violation first shows. Parameters are deliberately not
/// validated here so inadmissible sets can be probed.
inline SuiteResult quadrant_suite(const ModelParams& p, std::size_t samples, double extent, std::uint64_t seed,
                                  std::size_t workers = default_workers()) {
    SuiteResult s{"quadrant_invariance", true, true, samples, seed, {}, {}, {}};
    const KroneckerSequence<2> seq(seed);
    auto state_at = [&](std::size_t i) {
        const auto u = seq[i];
        return State{extent * u[0] * u[0], extent * u[1] * u[1]};
    };
    const std::size_t bad = parallel_first_failure(samples, workers, [&](std::size_t i) {
        const State w = step(p, state_at(i));
        return !(w.x >= 0.0 && w.y >= 0.0);
    });
    if (bad < samples) {
        const State z = state_at(bad);
        s.passed = false;
        s.witness = {z, step(p, z)};
        s.detail = "image leaves the nonnegative quadrant at sample " + std::to_string(bad);
    }
    detail::mark_vacuous(s);
    return s;
}

inline SuiteResult absorption_suite(const ModelParams& p, const VerifyOptions& o) {
    SuiteResult s{"absorption", true, true, o.absorption_starts, o.seed, {}, {}, {}};
    const KroneckerSequence<2> seq(o.seed);
    const Box start_box{0.0, o.absorption_extent, 0.0, o.absorption_extent};
    const std::size_t bad = parallel_first_failure(o.absorption_starts, o.workers, [&](std::size_t i) {
        const AbsorptionResult r = absorbing_entry(p, sample_box(start_box, seq[i]), o.absorption_budget,
                                                   o.absorption_tail);
        return !r.entry_step || !r.stayed;
    });
    if (bad < o.absorption_starts) {
        const State z = sample_box(start_box, seq[bad]);
        const AbsorptionResult r = absorbing_entry(p, z, o.absorption_budget, o.absorption_tail);
        s.passed = false;
        s.witness = {z};
        s.detail = !r.entry_step ? "not absorbed within " + std::to_string(o.absorption_budget) + " steps"
                                 : "left the absorbing box at step " + std::to_string(*r.exit_step);
    }
    detail::mark_vacuous(s);
    return s;
}

/// Invariance of the absorbing box and of Omega1/Omega2 anchored at every
/// positive fixed point.
inline std::vector<SuiteResult> region_suites(const ModelParams& p, const VerifyOptions& o) {
    std::vector<std::pair<std::string, RegionSpec>> regions{{"invariance_omega", region(p, RegionKind::Omega)}};
    for (const auto& fp : fixed_points(p)) {
        if (fp.kind == FixedPointKind::Origin) continue;
        const char* tag = fp.kind == FixedPointKind::Double  ? "double"
                          : fp.kind == FixedPointKind::Lower ? "lower"
                                                             : "upper";
        regions.emplace_back(std::string("invariance_omega1_") + tag, region(p, RegionKind::Omega1, fp));
        regions.emplace_back(std::string("invariance_omega2_") + tag, region(p, RegionKind::Omega2, fp));
    }
    std::vector<SuiteResult> out;
    for (const auto& [name, r] : regions) {
        const InvarianceCheck c = check_invariance(p, r, o.invariance_samples, o.seed, o.workers);
        SuiteResult s{name, true, c.passed, c.samples, c.seed, {}, {}, {}};
        if (c.witness) {
            s.witness = {c.witness->point, c.witness->image};
            s.detail = "image leaves the region at sample " + std::to_string(c.witness->index);
        }
        detail::mark_vacuous(s);
        out.push_back(std::move(s));
    }
    return out;
}

inline SuiteResult cooperativity_suite(const ModelParams& p, const VerifyOptions& o) {
    const CooperativityCheck c = check_cooperative(p, o.cooperative_pairs, o.seed, std::nullopt, o.workers);
    SuiteResult s{"cooperativity", true, c.passed, c.pairs, c.seed, {}, {}, {}};
    if (c.witness) {
        const auto& w = *c.witness;
        s.witness = {w.lower, w.upper, w.lower_image, w.upper_image};
        s.detail = "ordered pair loses its order at sample " + std::to_string(w.index);
    }
    detail::mark_vacuous(s);
    return s;
}

/// Runs every suite. With inadmissible parameters only the quadrant suite
/// runs; the rest are reported as skipped and failed.
inline VerifyReport verify_properties(const ModelParams& p, const VerifyOptions& o = {}) {
    VerifyReport rep;
    rep.params = p;
    rep.options = o;
    rep.suites.push_back(quadrant_suite(p, o.quadrant_samples, o.quadrant_extent, o.seed, o.workers));
    try {
        validate_params(p);
    } catch (const ParameterOutOfRange& e) {
        for (const char* name : {"absorption", "invariance", "cooperativity"}) {
            SuiteResult s{name, false, false, 0, o.seed, {}, std::string("skipped: ") + e.what(), {}};
            rep.suites.push_back(std::move(s));
        }
        return rep;
    }
    rep.suites.push_back(absorption_suite(p, o));
    for (auto& s : region_suites(p, o)) rep.suites.push_back(std::move(s));
    rep.suites.push_back(cooperativity_suite(p, o));
    return rep;
}

}  // namespace allee
