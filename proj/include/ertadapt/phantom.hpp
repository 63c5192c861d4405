#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ertadapt {

struct Point {
    double x = 0.0;
    double y = 0.0;

    double norm() const;
    friend bool operator==(const Point&, const Point&) = default;
};

/// The line {x : x . theta = s} with theta = (cos t, sin t).
/// The perpendicular is the counterclockwise rotation (-sin t, cos t).
struct LineCoords {
    double theta = 0.0;
    double s = 0.0;

    Point direction() const;
    Point perpendicular() const;
};

/// amplitude * 1{|x| <= r0}
struct DiskIndicator {
    double r0 = 1.0;
    double amplitude = 1.0;
};

/// amplitude * (1 - |x|^2)^p on the unit disk.
struct PolyBump {
    double p = 2.0;
    double amplitude = 1.0;
};

/// A h^(beta1 - 1) * b((x - x0) / h) with the C-infinity profile
/// b(u) = exp(1 - 1 / (1 - |u|^2)) on |u| < 1, so b(0) = 1.
struct LepskiBump {
    double amplitude = 0.5;  // A
    double beta1 = 1.5;
    double h = 0.25;
    Point x0{};
};

/// A bounded function supported in the unit disk.
///
/// Every kind is radially symmetric about center(); all operations are
/// const and the object is immutable after construction.
class Phantom {
public:
    using Kind = std::variant<DiskIndicator, PolyBump, LepskiBump>;

    /// Validates the parameters. big_l defaults to the certified sup |f|;
    /// an explicit value must be at least that.
    explicit Phantom(Kind kind, std::optional<double> big_l = std::nullopt);

    static Phantom disk(double r0, double amplitude);
    static Phantom poly_bump(double p, double amplitude);
    static Phantom lepski_bump(double amplitude, double beta1, double h, Point x0);
    /// The two-hypothesis bump at sample size n: h = (log n / n)^(1 / (2 beta1 + 1)).
    static Phantom lepski_bump_for_n(double amplitude, double beta1, std::size_t n, Point x0);

    /// {"kind": ..., "params": {...}}; unknown keys are rejected.
    static Phantom from_json(const nlohmann::json& spec);
    nlohmann::json to_json() const;
    /// Compact JSON form, stable across runs.
    std::string id() const;

    const Kind& kind() const { return kind_; }
    double big_l() const { return big_l_; }
    /// sup |f| implied by the construction.
    double certified_sup() const;
    double support_radius() const { return support_radius_; }
    /// Center of the radial symmetry and of the support disk.
    Point center() const;

    double eval(Point x) const;

    /// Exponential Radon transform T_mu f(theta, s): closed form for the disk and
    /// the polynomial bump, chord quadrature otherwise.
    double ert(LineCoords line, double mu) const;
    /// Chord quadrature for any kind (64-node Gauss-Legendre, adaptively bisected
    /// until the estimate is stable to 1e-12).
    double ert_quadrature(LineCoords line, double mu) const;

    /// f_eta(x) = E[f_bar_eta(x)], the mean of the kernel estimator at bandwidth eta.
    ///
    /// Evaluated through the equivalent ideal low-pass filter of radius 1/eta,
    /// which does not depend on mu.
    double smoothed(Point x, double eta) const;
    /// smoothed() for several bandwidths at once (any order).
    std::vector<double> smoothed_levels(Point x, std::span<const double> etas) const;

    /// f_eta(x) from the defining expectation integral
    ///   (1/4pi) int_0^{2pi} int_{-1}^{1} e^{-mu x.theta_perp} K_eta(x.theta - s) T_mu f(theta, s) ds dtheta
    /// by nested quadrature. `refine` multiplies both node counts.
    double smoothed_direct(Point x, double eta, double mu, int refine = 1) const;

    /// Sobolev index used to predict rates; see is_rate_regime().
    double effective_smoothness() const;
    /// Whether effective_smoothness() > 1, the regime covered by the rate theory.
    bool is_rate_regime() const { return effective_smoothness() > 1.0; }

    /// phi(k) with f_eta(x) = int_0^{1/eta} phi(k) J0(k |x - c|) dk, for the
    /// disk and the polynomial bump (closed-form Hankel transforms).
    double radial_spectrum(double k) const;

private:
    double smoothed_spectral(double dist, std::span<const double> cutoffs_sorted,
                             std::span<double> out) const;
    double smoothed_real_space(double dist, double cutoff) const;

    Kind kind_;
    double big_l_ = 0.0;
    double support_radius_ = 1.0;
};

/// T^#_mu g(x) = int_{S^1} e^{mu x.theta_perp} g(theta, x.theta) dtheta by the
/// periodic trapezoid rule with `nodes` points.
double dual_transform(const std::function<double(double theta, double s)>& g, Point x, double mu,
                      std::size_t nodes = 720);

}  // namespace ertadapt
