#pragma once

#include <cmath>
#include <random>

#include "allee/model.hpp"

namespace allee::testing {

/// alpha=0.4, gamma=1, mu=0.6, d0=0.5 with the given birth rate.
inline ModelParams base_params(double beta) { return {0.4, beta, 1.0, 0.6, 0.5, 0.0}; }

inline const double kNuBase = 2.25 * (2.0 + std::sqrt(3.0));

/// Random admissible d1 = 0 parameter set; beta spans [0.2, 5] * nu.
inline ModelParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ModelParams p;
    p.alpha = 0.02 + 0.9 * u(rng);
    p.d0 = 0.01 + (0.99 - p.alpha) * u(rng);
    p.gamma = 0.05 + 5.0 * u(rng);
    p.mu = 0.02 + 0.98 * u(rng);
    p.beta = 1.0;
    p.beta = nu(p) * (0.2 + 4.8 * u(rng));
    return p;
}

}  // namespace allee::testing
