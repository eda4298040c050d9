#pragma once

// Discrete larvae/adult mosquito map with a mate-finding Allee effect.
//
//   x' = beta*y^2/(gamma+y) + (1 - d0 - d1*x - alpha/(1+x))*x
//   y' = alpha*x/(1+x) + (1 - mu)*y
//
// Everything outside step() is restricted to d1 = 0, the case for which the
// fixed points, the existence threshold and the absorbing box have closed forms.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace allee {

/// Thrown when a parameter set violates the admissibility conditions.
/// `condition()` names the violated inequality, e.g. "alpha+d0<=1".
class ParameterOutOfRange : public std::invalid_argument {
public:
    explicit ParameterOutOfRange(std::string condition)
        : std::invalid_argument("parameter out of range: " + condition),
          condition_(std::move(condition)) {}

    const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

struct ModelParams {
    double alpha = 0.0;  // maximum emergence rate
    double beta = 0.0;   // birth rate
    double gamma = 0.0;  // Allee constant
    double mu = 0.0;     // adult death rate
    double d0 = 0.0;     // linear larvae death rate
    double d1 = 0.0;     // quadratic larvae death coefficient

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Larvae x and adults y.
struct State {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const State&, const State&) = default;
};

inline double max_norm_distance(const State& a, const State& b) {
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

/// North-east order: a <= b componentwise, up to `slack`.
inline bool ne_le(const State& a, const State& b, double slack = 0.0) {
    return a.x <= b.x + slack && a.y <= b.y + slack;
}

/// Axis-aligned closed rectangle [x_lo, x_hi] x [y_lo, y_hi].
struct Box {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;

    State lower_corner() const { return {x_lo, y_lo}; }
    State upper_corner() const { return {x_hi, y_hi}; }

    bool well_formed() const {
        return std::isfinite(x_lo) && std::isfinite(x_hi) && std::isfinite(y_lo) &&
               std::isfinite(y_hi) && x_lo <= x_hi && y_lo <= y_hi && x_lo >= 0.0 &&
               y_lo >= 0.0;
    }

    bool contains(const State& z, double slack = 0.0) const {
        return z.x >= x_lo - slack && z.x <= x_hi + slack && z.y >= y_lo - slack &&
               z.y <= y_hi + slack;
    }

    bool contains(const Box& other, double slack = 0.0) const {
        return contains(other.lower_corner(), slack) && contains(other.upper_corner(), slack);
    }

    friend bool operator==(const Box&, const Box&) = default;
};

enum class Validation {
    General,   // admissible for step(); d1 >= 0 allowed
    Analysis,  // additionally d1 == 0
};

/// Checks the conditions under which the map sends the closed quadrant into itself.
inline ModelParams validate_params(const ModelParams& p, Validation mode = Validation::Analysis) {
    const double fields[] = {p.alpha, p.beta, p.gamma, p.mu, p.d0, p.d1};
    for (double v : fields) {
        if (!std::isfinite(v)) throw ParameterOutOfRange("finite");
    }
    if (!(p.alpha > 0.0)) throw ParameterOutOfRange("alpha>0");
    if (!(p.beta > 0.0)) throw ParameterOutOfRange("beta>0");
    if (!(p.gamma > 0.0)) throw ParameterOutOfRange("gamma>0");
    if (!(p.mu > 0.0 && p.mu <= 1.0)) throw ParameterOutOfRange("0<mu<=1");
    if (!(p.d0 > 0.0)) throw ParameterOutOfRange("d0>0");
    if (!(p.alpha + p.d0 <= 1.0)) throw ParameterOutOfRange("alpha+d0<=1");
    if (!(p.d1 >= 0.0)) throw ParameterOutOfRange("d1>=0");
    if (mode == Validation::Analysis && p.d1 != 0.0) throw ParameterOutOfRange("d1=0");
    return p;
}

/// One application of the map. Not validated: callers in hot loops own that.
inline State step(const ModelParams& p, const State& z) {
    const double birth = p.beta * z.y * z.y / (p.gamma + z.y);
    const double survive = 1.0 - p.d0 - p.d1 * z.x - p.alpha / (1.0 + z.x);
    return {birth + survive * z.x, p.alpha * z.x / (1.0 + z.x) + (1.0 - p.mu) * z.y};
}

inline double residual(const ModelParams& p, const State& z) {
    return max_norm_distance(step(p, z), z);
}

/// Adult density on the nullcline y' = y for a given larvae density.
inline double adult_line(const ModelParams& p, double x) {
    return p.alpha * x / (p.mu * (1.0 + x));
}

/// Coefficients of a*x^2 + b*x + c = 0, whose positive roots are the larvae
/// coordinates of the positive fixed points.
struct FixedPointQuadratic {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double operator()(double x) const { return (a * x + b) * x + c; }
};

inline FixedPointQuadratic fixed_point_quadratic(const ModelParams& raw) {
    const ModelParams p = validate_params(raw);
    const double ag = p.alpha + p.gamma * p.mu;
    return {p.d0 * p.mu * ag,
            p.mu * (p.d0 * p.gamma * p.mu + (p.alpha + p.d0) * ag) - p.alpha * p.alpha * p.beta,
            p.gamma * p.mu * p.mu * (p.alpha + p.d0)};
}

/// Birth-rate threshold separating zero, one and two positive fixed points.
/// Independent of beta.
inline double nu(const ModelParams& raw) {
    const ModelParams p = validate_params(raw);
    const double s = std::sqrt(p.d0 * p.gamma * p.mu) +
                     std::sqrt((p.alpha + p.d0) * (p.alpha + p.gamma * p.mu));
    return p.mu / (p.alpha * p.alpha) * s * s;
}

inline double discriminant(const ModelParams& raw) {
    const ModelParams p = validate_params(raw);
    const double lead = p.mu * (p.d0 * p.gamma * p.mu + (p.alpha + p.d0) * (p.alpha + p.gamma * p.mu)) -
                        p.alpha * p.alpha * p.beta;
    return lead * lead - 4.0 * p.d0 * p.gamma * p.mu * p.mu * p.mu * (p.alpha + p.d0) *
                             (p.alpha + p.gamma * p.mu);
}

enum class Regime { BelowThreshold, AtThreshold, AboveThreshold };

struct ExistenceReport {
    double nu = 0.0;
    double discriminant = 0.0;
    Regime regime = Regime::BelowThreshold;
};

inline constexpr double kDefaultThresholdTol = 1e-9;

/// Classifies beta against nu with relative tolerance `tol`.
inline ExistenceReport existence_report(const ModelParams& p, double tol = kDefaultThresholdTol) {
    ExistenceReport r;
    r.nu = nu(p);
    r.discriminant = discriminant(p);
    const double band = tol * r.nu;
    if (std::abs(p.beta - r.nu) <= band)
        r.regime = Regime::AtThreshold;
    else if (p.beta < r.nu - band)
        r.regime = Regime::BelowThreshold;
    else
        r.regime = Regime::AboveThreshold;
    return r;
}

enum class FixedPointKind { Origin, Double, Lower, Upper };

struct FixedPoint {
    State point;
    double residual = 0.0;
    FixedPointKind kind = FixedPointKind::Origin;
};

inline constexpr double kFixedPointResidualTol = 1e-10;

inline double fixed_point_residual_bound(const State& z) {
    return kFixedPointResidualTol * (1.0 + std::max(std::abs(z.x), std::abs(z.y)));
}

/// Larvae coordinate of the double root reached at beta == nu.
inline double double_root_x(const ModelParams& raw) {
    const ModelParams p = validate_params(raw);
    return std::sqrt(p.gamma * p.mu * (p.alpha + p.d0) / (p.d0 * (p.alpha + p.gamma * p.mu)));
}

namespace detail {

inline FixedPoint make_fixed_point(const ModelParams& p, double x, FixedPointKind kind) {
    const State z{x, adult_line(p, x)};
    return {z, residual(p, z), kind};
}

}  // namespace detail

/// All fixed points in the closed quadrant, ascending in x with the origin first.
///
/// The root count follows the regime from existence_report(p, tol), so at the
/// threshold the double root is taken from its own closed form rather than
/// from (-b +- sqrt(D)) / 2a with D ~ 0. Above the threshold the larger
/// magnitude root comes from the usual formula and the other from c / (a*r).
inline std::vector<FixedPoint> fixed_points(const ModelParams& p, double tol = kDefaultThresholdTol) {
    const ExistenceReport rep = existence_report(p, tol);
    std::vector<FixedPoint> out;
    out.push_back(detail::make_fixed_point(p, 0.0, FixedPointKind::Origin));
    switch (rep.regime) {
    case Regime::BelowThreshold:
        break;
    case Regime::AtThreshold:
        out.push_back(detail::make_fixed_point(p, double_root_x(p), FixedPointKind::Double));
        break;
    case Regime::AboveThreshold: {
        const FixedPointQuadratic q = fixed_point_quadratic(p);
        const double root_d = std::sqrt(std::max(rep.discriminant, 0.0));
        const double big = -(q.b + std::copysign(root_d, q.b)) / 2.0;
        double r1 = big / q.a;
        double r2 = q.c / big;
        if (r1 > r2) std::swap(r1, r2);
        out.push_back(detail::make_fixed_point(p, r1, FixedPointKind::Lower));
        out.push_back(detail::make_fixed_point(p, r2, FixedPointKind::Upper));
        break;
    }
    }
    return out;
}

/// The absorbing box [0, omega1] x [0, omega2].
inline Box omega(const ModelParams& raw) {
    const ModelParams p = validate_params(raw);
    const double w1 = p.alpha * p.alpha * p.beta / (p.mu * p.d0 * (p.alpha + p.gamma * p.mu));
    return {0.0, w1, 0.0, p.alpha / p.mu};
}

}  // namespace allee
