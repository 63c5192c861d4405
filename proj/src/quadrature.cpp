#include "ertadapt/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ertadapt {

// Newton iteration on P_n from the Chebyshev-like initial guess.
GaussLegendre::GaussLegendre(std::size_t order) : nodes_(order), weights_(order) {
    if (order == 0) throw std::invalid_argument("Gauss-Legendre order must be positive");
    const std::size_t n = order;
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - static_cast<double>(j) * p2) / (j + 1.0);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double step = p0 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        // recompute the derivative at the converged node
        double p0 = 1.0;
        double p1 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * z * p1 - static_cast<double>(j) * p2) / (j + 1.0);
        }
        dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes_[i] = -z;
        nodes_[n - 1 - i] = z;
        weights_[i] = w;
        weights_[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes_[n / 2] = 0.0;
}

const GaussLegendre& gauss_legendre_16() {
    static const GaussLegendre rule(16);
    return rule;
}

const GaussLegendre& gauss_legendre_32() {
    static const GaussLegendre rule(32);
    return rule;
}

const GaussLegendre& gauss_legendre_64() {
    static const GaussLegendre rule(64);
    return rule;
}

}  // namespace ertadapt
