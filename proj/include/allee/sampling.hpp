#pragma once

// Low-discrepancy points in [0,1)^D from the additive recurrence
// u_n = frac(s + n * g), with g_i = phi_D^-(i+1) and phi_D the positive root of
// x^(D+1) = x + 1. The seed only picks the starting offset s.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace allee {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

template <std::size_t D>
class KroneckerSequence {
public:
    explicit KroneckerSequence(std::uint64_t seed = kDefaultSeed) {
        double phi = 2.0;
        for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / static_cast<double>(D + 1));
        double g = 1.0;
        for (std::size_t i = 0; i < D; ++i) {
            g /= phi;
            step_[i] = g;
        }
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (auto& s : offset_) s = unit(rng);
    }

    std::array<double, D> operator[](std::size_t n) const {
        std::array<double, D> u{};
        for (std::size_t i = 0; i < D; ++i) {
            // frac(s + n*g) computed as a fused multiply-add on the fractional parts.
            const double v = std::fma(static_cast<double>(n), step_[i], offset_[i]);
            u[i] = v - std::floor(v);
        }
        return u;
    }

private:
    std::array<double, D> step_{};
    std::array<double, D> offset_{};
};

inline double lerp_unit(double lo, double hi, double u) { return lo + (hi - lo) * u; }

}  // namespace allee
