#include "ertadapt/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ertadapt {

namespace {

constexpr double kPi = std::numbers::pi;

void check_bandwidth(double delta, const char* name) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw std::domain_error(std::string(name) + " must lie in (0, 1], got " +
                                std::to_string(delta));
    }
}

// integral_{lo}^{hi} r cos(s r) dr for |s| * hi < 1, as the power series
//   sum_k (-1)^k s^{2k} / (2k)! * (hi^{2k+2} - lo^{2k+2}) / (2k+2).
// hi^2 - lo^2 is passed separately so it stays exact when lo is close to hi.
double small_argument_series(double lo, double hi, double width2, double s) {
    const double s2 = s * s;
    const double lo2 = lo * lo;
    const double hi2 = hi * hi;
    // powdiff_k = hi^{2k+2} - lo^{2k+2} = width2 * sum_{j=0}^{k} hi^{2j} lo^{2(k-j)}
    double geom = 1.0;  // sum_{j=0}^{k} hi^{2j} lo^{2(k-j)}
    double hi_pow = 1.0;
    double coeff = 1.0;  // (-1)^k s^{2k} / (2k)!
    double sum = 0.0;
    for (int k = 0; k < 40; ++k) {
        const double term = coeff * width2 * geom / (2.0 * k + 2.0);
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        hi_pow *= hi2;
        geom = geom * lo2 + hi_pow;
        coeff *= -s2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
    }
    return sum;
}

// Closed antiderivative r sin(sr)/s + cos(sr)/s^2 between lo and hi.
double closed_form(double lo, double hi, double s) {
    const double sin_diff = hi * std::sin(s * hi) - lo * std::sin(s * lo);
    const double cos_diff = -2.0 * std::sin(0.5 * s * (hi + lo)) * std::sin(0.5 * s * (hi - lo));
    return sin_diff / s + cos_diff / (s * s);
}

}  // namespace

void KernelParams::validate() const {
    check_bandwidth(delta, "delta");
    if (!std::isfinite(mu)) throw std::domain_error("mu must be finite");
}

double KernelParams::cutoff() const { return std::sqrt(1.0 / (delta * delta) + mu * mu); }

void EstimatorConfig::validate() const {
    if (!(c_star > 0.0)) throw std::domain_error("c_star must be > 0");
    if (!(c_dstar > 0.0)) throw std::domain_error("c_dstar must be > 0");
    if (!(d2 > 0.0)) throw std::domain_error("d2 must be > 0");
    if (!(big_l >= 0.0)) throw std::domain_error("big_l must be >= 0");
    if (!(a >= 2.0)) throw std::domain_error("grid ratio a must be >= 2");
    if (!(sigma >= 0.0)) throw std::domain_error("sigma must be >= 0");
}

void EstimatorConfig::require_d2_constraint() const {
    if (d2 < min_d2()) {
        throw std::domain_error("d2 = " + std::to_string(d2) +
                                " violates d2 >= 20 L^2 / c_star = " + std::to_string(min_d2()));
    }
}

double default_d2(double c_star, double big_l) {
    return std::max(1.0, 20.0 * big_l * big_l / c_star);
}

Kernel::Kernel(const KernelParams& params) : params_(params) {
    params_.validate();
    lo_ = std::abs(params_.mu);
    hi_ = params_.cutoff();
    width2_ = 1.0 / (params_.delta * params_.delta);
}

double Kernel::operator()(double s) const {
    const double as = std::abs(s);
    const double integral =
        as * hi_ < 1.0 ? small_argument_series(lo_, hi_, width2_, as) : closed_form(lo_, hi_, as);
    return integral / kPi;
}

double kernel_eval(const KernelParams& params, double s) {
    if (!std::isfinite(s)) throw std::domain_error("kernel argument must be finite");
    return Kernel(params)(s);
}

double kernel_l2_cross(double mu, double delta, double eta) {
    check_bandwidth(delta, "delta");
    check_bandwidth(eta, "eta");
    if (delta == eta) return 0.0;
    const double wide = std::max(delta, eta);
    const double narrow = std::min(delta, eta);
    const double m_low = KernelParams{mu, wide}.cutoff();
    const double m_high = KernelParams{mu, narrow}.cutoff();
    return (m_high * m_high * m_high - m_low * m_low * m_low) / (3.0 * kPi);
}

double kernel_l2_norm(double mu, double delta) {
    check_bandwidth(delta, "delta");
    const double m = KernelParams{mu, delta}.cutoff();
    const double am = std::abs(mu);
    return (m * m * m - am * am * am) / (3.0 * kPi);
}

double lambda_stat(double delta, const EstimatorConfig& cfg) {
    check_bandwidth(delta, "delta");
    return std::max(1.0, std::sqrt(cfg.d2 * std::log(1.0 / delta)));
}

double v_stat(double delta, std::size_t n, const EstimatorConfig& cfg) {
    check_bandwidth(delta, "delta");
    if (n == 0) throw std::domain_error("n must be >= 1");
    return std::sqrt(cfg.c_star / (delta * delta * delta) / static_cast<double>(n));
}

double v_cross_stat(double delta, double eta, std::size_t n, double mu,
                    const EstimatorConfig& cfg) {
    if (eta > delta) throw std::invalid_argument("v_cross_stat requires eta <= delta");
    if (n == 0) throw std::domain_error("n must be >= 1");
    return std::sqrt(cfg.c_dstar / static_cast<double>(n) * kernel_l2_cross(mu, delta, eta));
}

double psi_stat(double delta, double eta, std::size_t n, double mu, const EstimatorConfig& cfg) {
    if (eta > delta) throw std::invalid_argument("psi_stat requires eta <= delta");
    return v_stat(delta, n, cfg) * lambda_stat(delta, cfg) +
           v_cross_stat(delta, eta, n, mu, cfg) * lambda_stat(eta, cfg);
}

}  // namespace ertadapt
