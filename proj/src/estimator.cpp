#include "ertadapt/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ertadapt {

namespace {

bool admissible(std::size_t n, double a) {
    const double nn = static_cast<double>(n);
    return n >= 2 && a * std::log(nn) / nn <= 1.0;
}

}  // namespace

std::size_t minimal_admissible_n(double a) {
    if (!(a >= 2.0)) throw std::domain_error("grid ratio a must be >= 2");
    // a log n / n is decreasing for n >= 3, so the first admissible n past the
    // hump at n = e stays admissible.
    std::size_t n = 3;
    while (!admissible(n, a)) ++n;
    if (admissible(2, a)) return 2;
    return n;
}

BandwidthGrid make_grid(std::size_t n, double a) {
    if (!(a >= 2.0)) throw std::domain_error("grid ratio a must be >= 2, got " + std::to_string(a));
    if (!admissible(n, a)) {
        throw std::domain_error("make_grid: n = " + std::to_string(n) +
                                " violates a log n / n <= 1 for a = " + std::to_string(a) +
                                "; minimal admissible n is " +
                                std::to_string(minimal_admissible_n(a)));
    }
    BandwidthGrid grid;
    grid.a = a;
    grid.n = n;
    grid.delta_min = std::log(static_cast<double>(n)) / static_cast<double>(n);
    double delta = 1.0;
    while (delta >= grid.delta_min) {
        grid.levels.push_back(delta);
        delta /= a;
    }
    return grid;
}

std::vector<double> kernel_estimates(const Sinogram& sg, Point x, std::span<const double> deltas) {
    if (sg.samples.empty()) throw std::domain_error("kernel_estimate: empty sinogram");
    if (!std::isfinite(x.x) || !std::isfinite(x.y)) throw std::domain_error("x must be finite");
    std::vector<Kernel> kernels;
    kernels.reserve(deltas.size());
    for (double d : deltas) kernels.emplace_back(KernelParams{sg.mu, d});
    std::vector<double> acc(deltas.size(), 0.0);
    const bool weighted = sg.mu != 0.0;
    for (const auto& obs : sg.samples) {
        const double c = std::cos(obs.theta);
        const double s = std::sin(obs.theta);
        const double u = x.x * c + x.y * s - obs.s;
        double wy = obs.y;
        if (weighted) wy *= std::exp(-sg.mu * (-x.x * s + x.y * c));
        for (std::size_t j = 0; j < kernels.size(); ++j) acc[j] += kernels[j](u) * wy;
    }
    const double inv_n = 1.0 / static_cast<double>(sg.samples.size());
    for (double& v : acc) v *= inv_n;
    return acc;
}

double kernel_estimate(const Sinogram& sg, Point x, double delta) {
    const double deltas[] = {delta};
    return kernel_estimates(sg, x, deltas).front();
}

PointEstimate lepski_rule(std::span<const double> estimates, Point x, const BandwidthGrid& grid,
                          double mu, const EstimatorConfig& cfg) {
    if (estimates.size() != grid.size())
        throw std::invalid_argument("lepski_rule: one estimate per grid level required");
    PointEstimate out;
    out.x = x;
    out.per_level.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) out.per_level.push_back({grid.levels[j], estimates[j]});

    const std::size_t last = grid.size() - 1;
    std::size_t chosen = last;
    for (std::size_t j = 0; j < last; ++j) {
        bool passes = true;
        for (std::size_t k = j + 1; k < grid.size(); ++k) {
            const double diff = std::abs(estimates[j] - estimates[k]);
            const double psi = psi_stat(grid.levels[j], grid.levels[k], grid.n, mu, cfg);
            if (diff > psi) {
                out.failed_pairs.push_back({grid.levels[j], grid.levels[k], diff, psi});
                passes = false;
                break;
            }
        }
        if (passes) {
            chosen = j;
            break;
        }
    }
    // The smallest level has no eta below it, so the candidate set is never empty.
    out.selected = chosen;
    out.delta_bar = grid.levels[chosen];
    out.value = estimates[chosen];
    return out;
}

PointEstimate lepski_select(const Sinogram& sg, Point x, const BandwidthGrid& grid,
                            const EstimatorConfig& cfg) {
    if (grid.n != sg.n()) {
        throw std::invalid_argument("lepski_select: grid built for n = " + std::to_string(grid.n) +
                                    " but sinogram has n = " + std::to_string(sg.n()));
    }
    const auto estimates = kernel_estimates(sg, x, grid.levels);
    return lepski_rule(estimates, x, grid, sg.mu, cfg);
}

nlohmann::json to_json(const PointEstimate& est) {
    nlohmann::json per_level = nlohmann::json::array();
    for (const auto& l : est.per_level) per_level.push_back({{"delta", l.delta}, {"estimate", l.estimate}});
    nlohmann::json failed = nlohmann::json::array();
    for (const auto& f : est.failed_pairs)
        failed.push_back({{"delta", f.delta}, {"eta", f.eta}, {"diff", f.diff}, {"psi", f.psi}});
    return {{"x", {est.x.x, est.x.y}},
            {"delta_bar", est.delta_bar},
            {"value", est.value},
            {"per_level", per_level},
            {"failed_pairs", failed}};
}

OracleBandwidth oracle_bandwidth_detail(const Phantom& ph, Point x, const BandwidthGrid& grid,
                                        std::size_t n, const EstimatorConfig& cfg, double mu) {
    (void)mu;  // f_eta does not depend on mu
    cfg.validate();
    cfg.require_d2_constraint();
    if (ph.big_l() > cfg.big_l) {
        throw std::domain_error("phantom sup bound " + std::to_string(ph.big_l()) +
                                " exceeds configured L = " + std::to_string(cfg.big_l));
    }
    const double fx = ph.eval(x);
    const auto smoothed = ph.smoothed_levels(x, grid.levels);
    OracleBandwidth out;
    out.bias.reserve(grid.size());
    for (double v : smoothed) out.bias.push_back(std::abs(v - fx));
    // worst bias over eta <= levels[j], accumulated from the finest level up
    std::vector<double> worst(grid.size());
    double running = 0.0;
    for (std::size_t k = grid.size(); k-- > 0;) {
        running = std::max(running, out.bias[k]);
        worst[k] = running;
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double threshold = v_stat(grid.levels[j], n, cfg) * lambda_stat(grid.levels[j], cfg) / 2.0;
        if (worst[j] <= threshold) {
            out.delta = grid.levels[j];
            out.index = j;
            return out;
        }
    }
    throw std::logic_error("oracle_bandwidth: no grid level meets the bias threshold");
}

double oracle_bandwidth(const Phantom& ph, Point x, const BandwidthGrid& grid, std::size_t n,
                        const EstimatorConfig& cfg, double mu) {
    return oracle_bandwidth_detail(ph, x, grid, n, cfg, mu).delta;
}

RateValue rate_functional(const Phantom& ph, Point x, std::size_t n, const EstimatorConfig& cfg,
                          double mu, int refinement) {
    (void)mu;
    if (refinement < 1) throw std::domain_error("refinement must be >= 1");
    if (n < 2) throw std::domain_error("rate_functional: n must be >= 2");
    const double nn = static_cast<double>(n);
    const double floor = std::log(nn) / nn;
    std::vector<double> deltas;  // descending
    const double step = std::pow(cfg.a, -1.0 / refinement);
    for (double d = 1.0; d >= floor; d *= step) deltas.push_back(d);
    if (deltas.empty() || deltas.back() > floor) deltas.push_back(std::min(1.0, floor));

    const double fx = ph.eval(x);
    const auto smoothed = ph.smoothed_levels(x, deltas);
    const double noise_scale = cfg.c_star * std::log(nn) / nn;
    RateValue best{std::numeric_limits<double>::infinity(), 1.0};
    double sup_bias2 = 0.0;
    for (std::size_t i = deltas.size(); i-- > 0;) {
        const double b = smoothed[i] - fx;
        sup_bias2 = std::max(sup_bias2, b * b);
        const double d = deltas[i];
        const double value = sup_bias2 + noise_scale / (d * d * d);
        if (value <= best.value) best = {value, d};
    }
    return best;
}

}  // namespace ertadapt
