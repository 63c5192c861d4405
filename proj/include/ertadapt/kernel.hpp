#pragma once

#include <cstddef>

namespace ertadapt {

/// Bandwidth and attenuation of the band-limited backprojection filter.
///
/// The filter passes radial frequencies r in [|mu|, M] with
/// M = sqrt(1/delta^2 + mu^2), weighting each by r.
struct KernelParams {
    double mu = 0.0;
    double delta = 1.0;

    /// Throws std::domain_error unless delta is in (0, 1] and mu is finite.
    void validate() const;

    /// Upper frequency cutoff M(delta).
    double cutoff() const;
};

/// Constants governing the Lepski thresholds.
struct EstimatorConfig {
    double c_star = 1.0;   ///< variance scale: v^2(delta) = c_star * delta^-3 / n
    double c_dstar = 1.0;  ///< scale of the pairwise difference variance
    double d2 = 20.0;      ///< lambda(delta) = max(1, sqrt(d2 * log(1/delta)))
    double big_l = 1.0;    ///< sup bound of the function class
    double a = 2.0;        ///< bandwidth grid ratio
    double sigma = 0.0;    ///< noise standard deviation

    /// Positivity of the constants and a >= 2. Throws std::domain_error.
    void validate() const;

    /// Smallest d2 that makes the oracle bandwidth well defined: 20 L^2 / c*.
    double min_d2() const { return 20.0 * big_l * big_l / c_star; }

    /// Throws std::domain_error if d2 < 20 L^2 / c*.
    void require_d2_constraint() const;
};

/// Default d2 for a given c* and L: max(1, 20 L^2 / c*).
double default_d2(double c_star, double big_l);

/// K_delta(s) = (1/pi) * integral_{|mu|}^{M} r cos(s r) dr.
double kernel_eval(const KernelParams& params, double s);

/// Validated kernel with its cutoffs precomputed, for evaluation in hot loops.
class Kernel {
public:
    explicit Kernel(const KernelParams& params);

    /// K_delta(s); s must be finite (unchecked).
    double operator()(double s) const;

    const KernelParams& params() const { return params_; }

private:
    KernelParams params_;
    double lo_;
    double hi_;
    double width2_;
};

/// integral over R of (K_delta - K_eta)^2, via the spectral support of K:
/// (M(min)^3 - M(max)^3) / (3 pi). Symmetric in (delta, eta).
double kernel_l2_cross(double mu, double delta, double eta);

/// integral over R of K_delta^2 = (M(delta)^3 - |mu|^3) / (3 pi).
double kernel_l2_norm(double mu, double delta);

double lambda_stat(double delta, const EstimatorConfig& cfg);

/// v(delta) = sqrt(c_star * delta^-3 / n).
double v_stat(double delta, std::size_t n, const EstimatorConfig& cfg);

/// v(delta, eta) = sqrt(c_dstar / n * kernel_l2_cross). Requires eta <= delta.
double v_cross_stat(double delta, double eta, std::size_t n, double mu,
                    const EstimatorConfig& cfg);

/// psi(delta, eta) = v(delta) lambda(delta) + v(delta, eta) lambda(eta).
/// Requires eta <= delta.
double psi_stat(double delta, double eta, std::size_t n, double mu,
                const EstimatorConfig& cfg);

}  // namespace ertadapt
