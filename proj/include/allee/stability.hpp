#pragma once

// Local stability of fixed points: Jacobian, characteristic polynomial
// F(l) = l^2 + B*l + C, and the case analysis of its roots against the unit
// circle driven by the signs of F(1), F(-1), C - 1 and B.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "allee/model.hpp"

namespace allee {

using Matrix2 = std::array<std::array<double, 2>, 2>;

class NotAFixedPoint : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Partial derivatives of the d1 = 0 map at z, row-major: [[dx'/dx, dx'/dy], [dy'/dx, dy'/dy]].
inline Matrix2 jacobian(const ModelParams& raw, const State& z) {
    const ModelParams p = validate_params(raw);
    const double inv = 1.0 / ((1.0 + z.x) * (1.0 + z.x));
    const double gy = p.gamma + z.y;
    return {{{1.0 - p.d0 - p.alpha * inv, p.beta * z.y * (2.0 * p.gamma + z.y) / (gy * gy)},
             {p.alpha * inv, 1.0 - p.mu}}};
}

/// Eigenvalues of a 2x2 matrix from the closed form
/// (a+d)/2 +- sqrt(((a-d)/2)^2 + b*c), larger real part first.
inline std::array<std::complex<double>, 2> eigenvalues(const Matrix2& m) {
    const double half_tr = 0.5 * (m[0][0] + m[1][1]);
    const double half_diff = 0.5 * (m[0][0] - m[1][1]);
    const double disc = half_diff * half_diff + m[0][1] * m[1][0];
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        return {std::complex<double>(half_tr + r, 0.0), std::complex<double>(half_tr - r, 0.0)};
    }
    const double im = std::sqrt(-disc);
    return {std::complex<double>(half_tr, im), std::complex<double>(half_tr, -im)};
}

struct QuadraticCoeffs {
    double B = 0.0;
    double C = 0.0;

    double operator()(double lambda) const { return (lambda + B) * lambda + C; }
};

/// B and C at a fixed point, written out from the Jacobian entries.
inline QuadraticCoeffs char_coeffs(const ModelParams& raw, const FixedPoint& fp) {
    const ModelParams p = validate_params(raw);
    const double x = fp.point.x;
    const double y = fp.point.y;
    const double a = p.alpha / ((1.0 + x) * (1.0 + x));
    const double gy = p.gamma + y;
    const double birth_slope = p.beta * y * (2.0 * p.gamma + y) / (gy * gy);
    return {p.mu + p.d0 + a - 2.0, (1.0 - p.d0 - a) * (1.0 - p.mu) - a * birth_slope};
}

enum class LemmaCase {
    BothInside,                   // i.1
    MinusOneSimple,               // i.2
    OneInOneOut,                  // i.3
    BothOutside,                  // i.4
    ComplexOnCircle,              // i.5
    DoubleMinusOne,               // i.6
    OneRootAtOne,                 // ii
    BeyondOneOtherBelowMinusOne,  // iii.1, strict
    BeyondOneOtherAtMinusOne,     // iii.1, equality
    BeyondOneOtherInside,         // iii.2
};

/// Where the second root sits when 1 is a root.
enum class OtherRoot { Inside, OnCircle, Outside };

struct RootClass {
    LemmaCase case_tag = LemmaCase::BothInside;
    std::optional<OtherRoot> other;  // set only for OneRootAtOne
    std::complex<double> lambda1;
    std::complex<double> lambda2;

    bool real() const { return lambda1.imag() == 0.0 && lambda2.imag() == 0.0; }
};

inline std::string case_label(const RootClass& rc) {
    switch (rc.case_tag) {
    case LemmaCase::BothInside: return "i.1";
    case LemmaCase::MinusOneSimple: return "i.2";
    case LemmaCase::OneInOneOut: return "i.3";
    case LemmaCase::BothOutside: return "i.4";
    case LemmaCase::ComplexOnCircle: return "i.5";
    case LemmaCase::DoubleMinusOne: return "i.6";
    case LemmaCase::OneRootAtOne:
        switch (rc.other.value_or(OtherRoot::OnCircle)) {
        case OtherRoot::Inside: return "ii(<1)";
        case OtherRoot::OnCircle: return "ii(=1)";
        case OtherRoot::Outside: return "ii(>1)";
        }
        break;
    case LemmaCase::BeyondOneOtherBelowMinusOne: return "iii.1";
    case LemmaCase::BeyondOneOtherAtMinusOne: return "iii.1(=)";
    case LemmaCase::BeyondOneOtherInside: return "iii.2";
    }
    return "?";
}

namespace detail {

/// Roots of l^2 + B*l + C, real pair in descending order or a conjugate pair
/// with positive imaginary part first.
inline std::array<std::complex<double>, 2> quadratic_roots(const QuadraticCoeffs& q) {
    const double disc = q.B * q.B - 4.0 * q.C;
    if (disc >= 0.0) {
        const double big = -0.5 * (q.B + std::copysign(std::sqrt(disc), q.B));
        if (big == 0.0) return {std::complex<double>(0.0), std::complex<double>(0.0)};
        double r1 = big;
        double r2 = q.C / big;
        if (r1 < r2) std::swap(r1, r2);
        return {std::complex<double>(r1), std::complex<double>(r2)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(-0.5 * q.B, im), std::complex<double>(-0.5 * q.B, -im)};
}

}  // namespace detail

inline constexpr double kUnitCircleEps = 1e-9;

/// Sign analysis of F(1), F(-1), C and B. Zero tests use the band
/// eps * (1 + |B| + |C|). Roots are always computed explicitly alongside the tag.
inline RootClass classify_quadratic(const QuadraticCoeffs& q, double eps = kUnitCircleEps) {
    const double band = eps * (1.0 + std::abs(q.B) + std::abs(q.C));
    const double f1 = 1.0 + q.B + q.C;
    const double fm1 = 1.0 - q.B + q.C;
    auto zero = [band](double v) { return std::abs(v) <= band; };

    RootClass rc;
    const auto roots = detail::quadratic_roots(q);
    rc.lambda1 = roots[0];
    rc.lambda2 = roots[1];

    if (zero(f1)) {
        rc.case_tag = LemmaCase::OneRootAtOne;
        const double c_mod = std::abs(q.C);
        rc.other = std::abs(c_mod - 1.0) <= band ? OtherRoot::OnCircle
                   : c_mod < 1.0                 ? OtherRoot::Inside
                                                 : OtherRoot::Outside;
        // Root nearest 1 goes first.
        if (std::abs(rc.lambda2 - 1.0) < std::abs(rc.lambda1 - 1.0)) std::swap(rc.lambda1, rc.lambda2);
    } else if (f1 > 0.0) {
        if (zero(fm1))
            rc.case_tag = zero(q.B - 2.0) ? LemmaCase::DoubleMinusOne : LemmaCase::MinusOneSimple;
        else if (fm1 < 0.0)
            rc.case_tag = LemmaCase::OneInOneOut;
        else if (zero(q.C - 1.0))
            rc.case_tag = LemmaCase::ComplexOnCircle;
        else
            rc.case_tag = q.C < 1.0 ? LemmaCase::BothInside : LemmaCase::BothOutside;
    } else {
        if (zero(fm1))
            rc.case_tag = LemmaCase::BeyondOneOtherAtMinusOne;
        else
            rc.case_tag = fm1 < 0.0 ? LemmaCase::BeyondOneOtherBelowMinusOne
                                    : LemmaCase::BeyondOneOtherInside;
    }
    return rc;
}

enum class FixedPointType { Attracting, Repelling, Saddle, NonHyperbolic };

inline const char* to_string(FixedPointType t) {
    switch (t) {
    case FixedPointType::Attracting: return "Attracting";
    case FixedPointType::Repelling: return "Repelling";
    case FixedPointType::Saddle: return "Saddle";
    case FixedPointType::NonHyperbolic: return "NonHyperbolic";
    }
    return "?";
}

/// The type the closed-form theory assigns to each kind of fixed point.
inline FixedPointType reference_type(FixedPointKind kind) {
    switch (kind) {
    case FixedPointKind::Origin: return FixedPointType::Attracting;
    case FixedPointKind::Double: return FixedPointType::NonHyperbolic;
    case FixedPointKind::Lower: return FixedPointType::Repelling;
    case FixedPointKind::Upper: return FixedPointType::Attracting;
    }
    return FixedPointType::NonHyperbolic;
}

struct StabilityReport {
    QuadraticCoeffs coeffs;
    double f_at_1 = 0.0;
    double f_at_minus1 = 0.0;
    RootClass roots;
    FixedPointType fp_type = FixedPointType::NonHyperbolic;
    bool semi_attracting = false;
    std::array<std::complex<double>, 2> jacobian_eigenvalues{};
    double oracle_deviation = 0.0;  // root-set distance to jacobian_eigenvalues
    bool oracle_agrees = true;
    std::vector<std::string> notes;
};

/// Type from root moduli alone: inside means < 1 - eps, outside > 1 + eps.
inline FixedPointType type_from_moduli(double m1, double m2, double eps = kUnitCircleEps) {
    auto inside = [eps](double m) { return m < 1.0 - eps; };
    auto outside = [eps](double m) { return m > 1.0 + eps; };
    if (inside(m1) && inside(m2)) return FixedPointType::Attracting;
    if (outside(m1) && outside(m2)) return FixedPointType::Repelling;
    if ((inside(m1) && outside(m2)) || (outside(m1) && inside(m2))) return FixedPointType::Saddle;
    return FixedPointType::NonHyperbolic;
}

inline constexpr double kOracleTol = 1e-8;

inline StabilityReport classify_fixed_point(const ModelParams& p, const FixedPoint& fp,
                                            double eps = kUnitCircleEps) {
    const double res = residual(p, fp.point);
    if (!(res <= fixed_point_residual_bound(fp.point)))
        throw NotAFixedPoint("residual " + std::to_string(res) + " exceeds fixed-point bound");

    StabilityReport rep;
    rep.coeffs = char_coeffs(p, fp);
    rep.f_at_1 = rep.coeffs(1.0);
    rep.f_at_minus1 = rep.coeffs(-1.0);
    rep.roots = classify_quadratic(rep.coeffs, eps);

    const double m1 = std::abs(rep.roots.lambda1);
    const double m2 = std::abs(rep.roots.lambda2);
    rep.fp_type = type_from_moduli(m1, m2, eps);
    if (rep.fp_type == FixedPointType::NonHyperbolic) {
        const bool on1 = std::abs(m1 - 1.0) <= eps;
        const bool on2 = std::abs(m2 - 1.0) <= eps;
        rep.semi_attracting = (on1 && m2 < 1.0 - eps) || (on2 && m1 < 1.0 - eps);
    }

    rep.jacobian_eigenvalues = eigenvalues(jacobian(p, fp.point));
    const auto& ev = rep.jacobian_eigenvalues;
    const double straight = std::max(std::abs(rep.roots.lambda1 - ev[0]), std::abs(rep.roots.lambda2 - ev[1]));
    const double crossed = std::max(std::abs(rep.roots.lambda1 - ev[1]), std::abs(rep.roots.lambda2 - ev[0]));
    rep.oracle_deviation = std::min(straight, crossed);
    rep.oracle_agrees = rep.oracle_deviation <= kOracleTol;
    if (!rep.oracle_agrees)
        rep.notes.push_back("characteristic roots deviate from Jacobian eigenvalues by " +
                            std::to_string(rep.oracle_deviation));

    const FixedPointType expected = reference_type(fp.kind);
    if (rep.fp_type != expected) {
        rep.notes.push_back(std::string("computed type ") + to_string(rep.fp_type) +
                            " differs from the closed-form classification " + to_string(expected) +
                            " (case " + case_label(rep.roots) + ", F(1)=" + std::to_string(rep.f_at_1) +
                            ", F(-1)=" + std::to_string(rep.f_at_minus1) + ")");
    }
    return rep;
}

}  // namespace allee
