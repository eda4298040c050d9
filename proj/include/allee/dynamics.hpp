#pragma once

// Global behaviour of the map: trajectories, the regions used by the
// convergence results, sampled invariance and cooperativity checks, entry
// into the absorbing box, corner-iteration certificates on order intervals,
// and basin rasters.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "allee/model.hpp"
#include "allee/parallel.hpp"
#include "allee/sampling.hpp"
#include "allee/stability.hpp"

namespace allee {

/// Absolute slack for every set-membership and order test.
inline constexpr double kBoundarySlack = 1e-12;

// ---------------------------------------------------------------------------
// Trajectories

enum class Verdict { ConvergedTo, MaxItersReached, LeftDomain };

struct TrajectoryOptions {
    std::size_t max_iters = 100'000;
    double tol = 1e-10;
    std::size_t stride = 1;    // keep every stride-th point (the last one is always kept)
    bool store_points = true;
};

/// Budgets per regime. Near the non-hyperbolic point the approach is
/// sub-geometric (distance ~ 1/n), so only the iteration budget grows.
inline TrajectoryOptions default_trajectory_options(Regime regime) {
    TrajectoryOptions opt;
    if (regime == Regime::AtThreshold) opt.max_iters = 1'000'000;
    return opt;
}

struct Trajectory {
    std::vector<State> points;
    Verdict verdict = Verdict::MaxItersReached;
    State last;                      // final iterate; the limit when converged
    std::size_t iterations_used = 0;
    double last_step = 0.0;          // |last - previous| in max-norm
    double error_estimate = 0.0;     // geometric extrapolation of the remaining distance
    std::size_t stride = 1;          // points[k] is iterate k*stride, except the final one
};

/// Iterates until |z_n - z_{n-1}| <= tol and residual(z_n) <= tol.
inline Trajectory trajectory(const ModelParams& raw, const State& z0, const TrajectoryOptions& opt = {}) {
    const ModelParams p = validate_params(raw, Validation::General);
    if (!(z0.x >= 0.0 && z0.y >= 0.0) || !std::isfinite(z0.x) || !std::isfinite(z0.y))
        throw std::invalid_argument("initial state must lie in the closed nonnegative quadrant");
    const std::size_t stride = std::max<std::size_t>(opt.stride, 1);

    Trajectory t;
    t.stride = stride;
    if (opt.store_points) t.points.push_back(z0);
    State cur = z0;
    for (std::size_t n = 1; n <= opt.max_iters; ++n) {
        const State next = step(p, cur);
        t.iterations_used = n;
        t.last = next;
        const bool keep = opt.store_points && (n % stride == 0);
        if (!(next.x >= 0.0 && next.y >= 0.0) || !std::isfinite(next.x) || !std::isfinite(next.y)) {
            if (opt.store_points) t.points.push_back(next);
            t.verdict = Verdict::LeftDomain;
            t.error_estimate = std::numeric_limits<double>::infinity();
            return t;
        }
        const double s = max_norm_distance(next, cur);
        t.last_step = s;
        if (s <= opt.tol) {
            const double r = residual(p, next);
            if (r <= opt.tol) {
                if (opt.store_points) t.points.push_back(next);
                t.verdict = Verdict::ConvergedTo;
                const double q = s > 0.0 ? r / s : 0.0;
                t.error_estimate = q < 1.0 ? r / (1.0 - q) : std::numeric_limits<double>::infinity();
                return t;
            }
        }
        if (keep) t.points.push_back(next);
        cur = next;
    }
    if (opt.store_points && (t.points.empty() || !(t.points.back() == t.last))) t.points.push_back(t.last);
    t.verdict = Verdict::MaxItersReached;
    t.error_estimate = std::numeric_limits<double>::infinity();
    return t;
}

/// Index of the fixed point a converged limit belongs to. The match radius is
/// 10*tol widened to four times the extrapolated remaining distance, which
/// only matters for slow (non-hyperbolic) convergence.
inline std::optional<std::size_t> match_attractor(const Trajectory& t, const std::vector<FixedPoint>& candidates,
                                                  double tol) {
    if (t.verdict != Verdict::ConvergedTo) return std::nullopt;
    const double radius = std::max(10.0 * tol, 4.0 * t.error_estimate);
    std::optional<std::size_t> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double d = max_norm_distance(t.last, candidates[i].point);
        if (d <= radius && d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Regions

class RegimeMismatch : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class RegionKind { Omega, Omega1, Omega2, Sub1, Sub2, Sub3, Sub4 };

struct RegionSpec {
    RegionKind kind = RegionKind::Omega;
    Box bounds;
    std::vector<State> excluded;  // measure-zero; sampling ignores it
};

namespace detail {

inline const FixedPoint* find_kind(const std::vector<FixedPoint>& fps, FixedPointKind k) {
    for (const auto& fp : fps)
        if (fp.kind == k) return &fp;
    return nullptr;
}

}  // namespace detail

/// Resolves a region for the current regime.
///   Omega1(z*) = [0,x*] x [0,y*] minus z*,  Omega2(z*) = [x*,w1] x [y*,w2] minus z*.
///   Sub1..Sub4 split Omega2(z2) by the upper positive fixed point z3:
///   [x3,w1]x[y3,w2], [x2,x3]x[y3,w2], [x2,x3]x[y2,y3], [x3,w1]x[y2,y3].
/// Omega1/Omega2 default to the double point (at threshold) or the lower point.
inline RegionSpec region(const ModelParams& p, RegionKind kind,
                         const std::optional<FixedPoint>& anchor = std::nullopt) {
    const Box om = omega(p);
    RegionSpec r;
    r.kind = kind;
    if (kind == RegionKind::Omega) {
        r.bounds = om;
        return r;
    }

    const auto fps = fixed_points(p);
    const FixedPoint* lower = detail::find_kind(fps, FixedPointKind::Lower);
    const FixedPoint* upper = detail::find_kind(fps, FixedPointKind::Upper);

    if (kind == RegionKind::Omega1 || kind == RegionKind::Omega2) {
        FixedPoint a;
        if (anchor) {
            if (anchor->kind == FixedPointKind::Origin || !(anchor->point.x > 0.0))
                throw RegimeMismatch("region anchor must be a positive fixed point");
            if (!(residual(p, anchor->point) <= fixed_point_residual_bound(anchor->point)))
                throw NotAFixedPoint("region anchor is not a fixed point");
            a = *anchor;
        } else if (const FixedPoint* d = detail::find_kind(fps, FixedPointKind::Double)) {
            a = *d;
        } else if (lower) {
            a = *lower;
        } else {
            throw RegimeMismatch("no positive fixed point below the existence threshold");
        }
        const State z = a.point;
        r.bounds = kind == RegionKind::Omega1 ? Box{0.0, z.x, 0.0, z.y} : Box{z.x, om.x_hi, z.y, om.y_hi};
        r.excluded.push_back(z);
        return r;
    }

    if (!lower || !upper) throw RegimeMismatch("subdivision needs three fixed points (beta above threshold)");
    const State z2 = lower->point;
    const State z3 = upper->point;
    switch (kind) {
    case RegionKind::Sub1: r.bounds = {z3.x, om.x_hi, z3.y, om.y_hi}; break;
    case RegionKind::Sub2: r.bounds = {z2.x, z3.x, z3.y, om.y_hi}; break;
    case RegionKind::Sub3:
        r.bounds = {z2.x, z3.x, z2.y, z3.y};
        r.excluded.push_back(z2);
        break;
    case RegionKind::Sub4: r.bounds = {z3.x, om.x_hi, z2.y, z3.y}; break;
    default: break;
    }
    return r;
}

inline RegionSpec region_from_box(const Box& b) { return {RegionKind::Omega, b, {}}; }

// ---------------------------------------------------------------------------
// Sampled set checks

struct InvarianceWitness {
    std::size_t index = 0;
    State point;
    State image;
};

struct InvarianceCheck {
    bool passed = true;
    std::size_t samples = 0;
    std::uint64_t seed = kDefaultSeed;
    std::optional<InvarianceWitness> witness;
};

inline State sample_box(const Box& b, const std::array<double, 2>& u) {
    return {lerp_unit(b.x_lo, b.x_hi, u[0]), lerp_unit(b.y_lo, b.y_hi, u[1])};
}

/// Samples the region and checks that every image stays in its closure.
inline InvarianceCheck check_invariance(const ModelParams& raw, const RegionSpec& r, std::size_t samples,
                                        std::uint64_t seed = kDefaultSeed, std::size_t workers = default_workers()) {
    const ModelParams p = validate_params(raw, Validation::General);
    const KroneckerSequence<2> seq(seed);
    InvarianceCheck out{true, samples, seed, std::nullopt};
    const std::size_t bad = parallel_first_failure(samples, workers, [&](std::size_t i) {
        return !r.bounds.contains(step(p, sample_box(r.bounds, seq[i])), kBoundarySlack);
    });
    if (bad < samples) {
        const State z = sample_box(r.bounds, seq[bad]);
        out.passed = false;
        out.witness = InvarianceWitness{bad, z, step(p, z)};
    }
    return out;
}

struct CooperativityWitness {
    std::size_t index = 0;
    State lower, upper;              // lower <= upper in NE order
    State lower_image, upper_image;  // not ordered
};

struct CooperativityCheck {
    bool passed = true;
    std::size_t pairs = 0;
    std::uint64_t seed = kDefaultSeed;
    std::optional<CooperativityWitness> witness;
};

inline bool preserves_order(const ModelParams& p, const State& lo, const State& hi, double slack = kBoundarySlack) {
    return ne_le(step(p, lo), step(p, hi), slack);
}

/// Draws NE-ordered pairs in `domain` (default: the absorbing box) and checks
/// that their images stay ordered.
inline CooperativityCheck check_cooperative(const ModelParams& raw, std::size_t pairs,
                                            std::uint64_t seed = kDefaultSeed,
                                            std::optional<Box> domain = std::nullopt,
                                            std::size_t workers = default_workers()) {
    const ModelParams p = validate_params(raw);
    const Box d = domain.value_or(omega(p));
    const KroneckerSequence<4> seq(seed);
    auto pair_at = [&](std::size_t i) {
        const auto u = seq[i];
        const State a = sample_box(d, {u[0], u[1]});
        const State b = sample_box(d, {u[2], u[3]});
        return std::pair<State, State>{{std::min(a.x, b.x), std::min(a.y, b.y)},
                                       {std::max(a.x, b.x), std::max(a.y, b.y)}};
    };
    CooperativityCheck out{true, pairs, seed, std::nullopt};
    const std::size_t bad = parallel_first_failure(pairs, workers, [&](std::size_t i) {
        const auto [lo, hi] = pair_at(i);
        return !preserves_order(p, lo, hi);
    });
    if (bad < pairs) {
        const auto [lo, hi] = pair_at(bad);
        out.passed = false;
        out.witness = CooperativityWitness{bad, lo, hi, step(p, lo), step(p, hi)};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Absorption

struct AbsorptionResult {
    std::optional<std::size_t> entry_step;  // empty: not absorbed within the budget
    bool stayed = false;                    // no exit during the verification window
    std::optional<std::size_t> exit_step;
    std::size_t verified_steps = 0;
};

/// Smallest k <= k_max with W^k(z0) in the absorbing box, then `verify_steps`
/// further iterates are checked to remain inside.
inline AbsorptionResult absorbing_entry(const ModelParams& p, const State& z0, std::size_t k_max,
                                        std::size_t verify_steps = 1000) {
    const Box om = omega(p);
    AbsorptionResult out;
    State z = z0;
    std::size_t k = 0;
    while (!om.contains(z, kBoundarySlack)) {
        if (k == k_max) return out;
        z = step(p, z);
        ++k;
    }
    out.entry_step = k;
    out.stayed = true;
    for (std::size_t j = 1; j <= verify_steps; ++j) {
        z = step(p, z);
        out.verified_steps = j;
        if (!om.contains(z, kBoundarySlack)) {
            out.stayed = false;
            out.exit_step = k + j;
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corner-iteration certificate

class InvalidBox : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotInvariant : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MonotonicityViolated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CornerOptions {
    std::size_t max_iters = 100'000'000;
    double tol = 1e-6;
    std::size_t boundary_samples = 256;
};

struct CornerCertificate {
    Box box;
    State lower_corner_limit;
    State upper_corner_limit;
    bool lower_converged = false;
    bool upper_converged = false;
    bool certified = false;
    std::optional<State> common_limit;
    std::size_t iterations = 0;
    double gap = 0.0;  // max-norm distance between the final corner iterates
};

namespace detail {

/// Distance still to travel, extrapolated from two successive window
/// displacements; infinite while they are not shrinking. Displacements at
/// rounding level count as settled.
inline double remaining_distance(double disp_now, double disp_before, double scale) {
    if (disp_now <= 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale)) return 0.0;
    if (!(disp_before > 0.0) || !std::isfinite(disp_before)) return std::numeric_limits<double>::infinity();
    const double q = disp_now / disp_before;
    return q < 1.0 ? disp_now * q / (1.0 - q) : std::numeric_limits<double>::infinity();
}

inline constexpr std::size_t kFirstCornerWindow = 1024;

}  // namespace detail

/// Iterates the lower-left and upper-right corners of `box`. For a cooperative
/// self-map of the box both sequences are monotone and bracket every
/// trajectory that starts inside, so once the bracket is narrower than `tol`
/// all of them share one limit. Certification is refused (certified = false)
/// when both corners settle on limits further apart than `tol`.
inline CornerCertificate corner_certificate(const ModelParams& p, const Box& box, const CornerOptions& opt = {}) {
    const Box om = omega(p);
    const double slack = kBoundarySlack * std::max(1.0, om.x_hi);
    if (!box.well_formed()) throw InvalidBox("box must satisfy 0 <= x_lo <= x_hi and 0 <= y_lo <= y_hi");
    if (!om.contains(box, slack)) throw InvalidBox("box must lie inside the absorbing box");

    const State lo = box.lower_corner();
    const State hi = box.upper_corner();
    if (!ne_le(lo, step(p, lo), kBoundarySlack) || !ne_le(step(p, hi), hi, kBoundarySlack))
        throw NotInvariant("box corners are not mapped into the box");
    const KroneckerSequence<1> seq;
    for (std::size_t i = 0; i < opt.boundary_samples; ++i) {
        const double u = seq[i][0];
        const State edge[4] = {{lerp_unit(box.x_lo, box.x_hi, u), box.y_lo},
                               {lerp_unit(box.x_lo, box.x_hi, u), box.y_hi},
                               {box.x_lo, lerp_unit(box.y_lo, box.y_hi, u)},
                               {box.x_hi, lerp_unit(box.y_lo, box.y_hi, u)}};
        for (const State& z : edge)
            if (!box.contains(step(p, z), kBoundarySlack))
                throw NotInvariant("boundary point is mapped outside the box");
    }

    CornerCertificate cert;
    cert.box = box;
    State lower = lo;
    State upper = hi;
    auto gap_of = [](const State& a, const State& b) { return std::max(b.x - a.x, b.y - a.y); };
    cert.gap = gap_of(lower, upper);

    if (cert.gap <= opt.tol) {
        cert.lower_corner_limit = lower;
        cert.upper_corner_limit = upper;
        cert.lower_converged = cert.upper_converged = cert.certified = true;
        cert.common_limit = State{0.5 * (lower.x + upper.x), 0.5 * (lower.y + upper.y)};
        return cert;
    }

    // Convergence of each corner is judged over windows of doubling length:
    // single steps near a non-hyperbolic limit are too small to compare
    // reliably, and for an O(1/n) approach the doubling ratio extrapolates exactly.
    std::size_t next_check = detail::kFirstCornerWindow;
    State lower_mark = lower;
    State upper_mark = upper;
    double lower_disp = std::numeric_limits<double>::infinity();
    double upper_disp = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= opt.max_iters; ++i) {
        const State nl = step(p, lower);
        const State nu = step(p, upper);
        if (!ne_le(lower, nl, kBoundarySlack) || !ne_le(nu, upper, kBoundarySlack) || !ne_le(nl, nu, kBoundarySlack))
            throw MonotonicityViolated("corner sequences lost monotonicity at iteration " + std::to_string(i));
        lower = nl;
        upper = nu;
        cert.iterations = i;
        cert.gap = gap_of(lower, upper);
        if (cert.gap <= opt.tol) {
            cert.lower_converged = cert.upper_converged = cert.certified = true;
            cert.common_limit = State{0.5 * (lower.x + upper.x), 0.5 * (lower.y + upper.y)};
            break;
        }
        if (i != next_check) continue;
        next_check *= 2;
        const double ld = max_norm_distance(lower, lower_mark);
        const double ud = max_norm_distance(upper, upper_mark);
        const double ls = std::max(std::abs(lower.x), std::abs(lower.y));
        const double us = std::max(std::abs(upper.x), std::abs(upper.y));
        cert.lower_converged = detail::remaining_distance(ld, lower_disp, ls) <= 0.25 * opt.tol;
        cert.upper_converged = detail::remaining_distance(ud, upper_disp, us) <= 0.25 * opt.tol;
        if (cert.lower_converged && cert.upper_converged) break;
        lower_mark = lower;
        upper_mark = upper;
        lower_disp = ld;
        upper_disp = ud;
    }
    cert.lower_corner_limit = lower;
    cert.upper_corner_limit = upper;
    return cert;
}

// ---------------------------------------------------------------------------
// Basins

/// Fixed points that attract an open set: Attracting, or non-hyperbolic with
/// the second eigenvalue inside the unit circle.
inline std::vector<FixedPoint> attractors(const ModelParams& p, double threshold_tol = kDefaultThresholdTol) {
    std::vector<FixedPoint> out;
    for (const auto& fp : fixed_points(p, threshold_tol)) {
        const StabilityReport rep = classify_fixed_point(p, fp);
        if (rep.fp_type == FixedPointType::Attracting ||
            (rep.fp_type == FixedPointType::NonHyperbolic && rep.semi_attracting))
            out.push_back(fp);
    }
    return out;
}

struct BasinRaster {
    static constexpr int kUndecided = -1;

    Box box;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<int> labels;  // row-major, index j * nx + i
    std::vector<FixedPoint> attractors;
    TrajectoryOptions budget;

    State cell_center(std::size_t i, std::size_t j) const {
        return {box.x_lo + (static_cast<double>(i) + 0.5) * (box.x_hi - box.x_lo) / static_cast<double>(nx),
                box.y_lo + (static_cast<double>(j) + 0.5) * (box.y_hi - box.y_lo) / static_cast<double>(ny)};
    }
    int label(std::size_t i, std::size_t j) const { return labels[j * nx + i]; }
    std::size_t count(int lbl) const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), lbl));
    }
};

/// Labels each cell centre by the attractor its trajectory reaches, or
/// kUndecided when the budget runs out or the limit is not an attractor.
inline BasinRaster basin_raster(const ModelParams& p, const Box& box, std::size_t nx, std::size_t ny,
                                TrajectoryOptions budget, std::size_t workers = default_workers()) {
    if (nx == 0 || ny == 0) throw std::invalid_argument("raster needs at least one cell per axis");
    if (!box.well_formed()) throw InvalidBox("raster box is malformed");
    BasinRaster r;
    r.box = box;
    r.nx = nx;
    r.ny = ny;
    r.attractors = attractors(p);
    budget.store_points = false;
    r.budget = budget;
    r.labels.assign(nx * ny, BasinRaster::kUndecided);
    parallel_chunks(nx * ny, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const Trajectory t = trajectory(p, r.cell_center(k % nx, k / nx), budget);
            if (const auto m = match_attractor(t, r.attractors, budget.tol)) r.labels[k] = static_cast<int>(*m);
        }
    });
    return r;
}

// ---------------------------------------------------------------------------
// Worked examples

/// Base parameters alpha=0.4, gamma=1, mu=0.6, d0=0.5 with beta = nu
/// (example 1, beta = (9/4)(2+sqrt 3)) or beta = 9 (example 2).
inline ModelParams reference_example_params(int example_id) {
    ModelParams p{0.4, 0.0, 1.0, 0.6, 0.5, 0.0};
    switch (example_id) {
    case 1: p.beta = 2.25 * (2.0 + std::sqrt(3.0)); break;
    case 2: p.beta = 9.0; break;
    default: throw std::invalid_argument("example id must be 1 or 2");
    }
    return p;
}

struct ExampleRow {
    State z0;
    State expected;
    Trajectory run;  // without stored points
    double distance = 0.0;
    bool reached = false;
};

struct ExampleTable {
    int example_id = 0;
    ModelParams params;
    TrajectoryOptions budget;
    double accuracy = 0.0;
    std::vector<ExampleRow> rows;
};

/// Runs the listed initial points of an example and compares each final
/// iterate with the fixed point it is expected to reach.
inline ExampleTable convergence_verdicts_for_examples(const ModelParams& p, int example_id) {
    const auto fps = fixed_points(p);
    const State origin{0.0, 0.0};
    ExampleTable tab;
    tab.example_id = example_id;
    tab.params = p;
    tab.budget = default_trajectory_options(existence_report(p).regime);
    tab.budget.store_points = false;

    std::vector<std::pair<State, State>> cases;
    if (example_id == 1) {
        const FixedPoint* d = detail::find_kind(fps, FixedPointKind::Double);
        if (!d) throw RegimeMismatch("example 1 needs beta at the existence threshold");
        tab.accuracy = 1e-4;
        cases = {{{0.1, 0.5}, origin}, {{2.5, 0.1}, origin}, {{0.1, 0.6}, d->point}, {{3.0, 0.1}, d->point}};
    } else if (example_id == 2) {
        const FixedPoint* u = detail::find_kind(fps, FixedPointKind::Upper);
        if (!u) throw RegimeMismatch("example 2 needs beta above the existence threshold");
        tab.accuracy = 1e-8;
        cases = {{{0.1, 0.3}, origin},   {{1.0, 0.1}, origin},   {{0.5, 0.5}, u->point},
                 {{0.5, 0.66}, u->point}, {{2.0, 0.1}, u->point}, {{4.0, 0.3}, u->point}};
    } else {
        throw std::invalid_argument("example id must be 1 or 2");
    }

    for (const auto& [z0, expected] : cases) {
        ExampleRow row;
        row.z0 = z0;
        row.expected = expected;
        row.run = trajectory(p, z0, tab.budget);
        row.distance = max_norm_distance(row.run.last, expected);
        row.reached = row.run.verdict == Verdict::ConvergedTo && row.distance <= tab.accuracy;
        tab.rows.push_back(row);
    }
    return tab;
}

inline ExampleTable convergence_verdicts_for_examples(int example_id) {
    return convergence_verdicts_for_examples(reference_example_params(example_id), example_id);
}

}  // namespace allee
