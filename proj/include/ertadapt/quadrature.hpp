#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ertadapt {

/// Gauss-Legendre rule on [-1, 1], nodes ascending.
class GaussLegendre {
public:
    explicit GaussLegendre(std::size_t order);

    std::size_t order() const { return nodes_.size(); }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }

    /// integral_a^b f(t) dt with one application of the rule.
    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (b + a);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
        return half * sum;
    }

    /// Composite rule over `panels` equal panels.
    template <class F>
    double integrate(F&& f, double a, double b, std::size_t panels) const {
        const double width = (b - a) / static_cast<double>(panels);
        double sum = 0.0;
        for (std::size_t p = 0; p < panels; ++p) {
            const double lo = a + width * static_cast<double>(p);
            sum += integrate(f, lo, p + 1 == panels ? b : lo + width);
        }
        return sum;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Shared read-only rules of common orders.
const GaussLegendre& gauss_legendre_16();
const GaussLegendre& gauss_legendre_32();
const GaussLegendre& gauss_legendre_64();

}  // namespace ertadapt
