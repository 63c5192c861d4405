#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "ertadapt/kernel.hpp"
#include "ertadapt/phantom.hpp"
#include "ertadapt/simulate.hpp"

namespace ertadapt {

/// Geometric bandwidth grid {a^-j} restricted to [log n / n, 1].
struct BandwidthGrid {
    double a = 2.0;
    std::size_t n = 0;
    double delta_min = 0.0;      ///< log n / n
    std::vector<double> levels;  ///< descending, levels[0] = 1

    std::size_t size() const { return levels.size(); }
};

/// Smallest n >= 2 with a log n / n <= 1 for this and every larger n.
std::size_t minimal_admissible_n(double a);

/// Throws std::domain_error if a < 2 or a log n / n > 1.
BandwidthGrid make_grid(std::size_t n, double a);

/// f_bar_delta(x) = (1/n) sum_i e^{-mu x.theta_i_perp} K_delta(x.theta_i - s_i) Y_i.
double kernel_estimate(const Sinogram& sg, Point x, double delta);

/// kernel_estimate for several bandwidths in one pass over the samples.
std::vector<double> kernel_estimates(const Sinogram& sg, Point x, std::span<const double> deltas);

struct LevelEstimate {
    double delta = 0.0;
    double estimate = 0.0;
};

/// First violated test |f_delta - f_eta| > psi(delta, eta) for a rejected delta.
struct FailedPair {
    double delta = 0.0;
    double eta = 0.0;
    double diff = 0.0;
    double psi = 0.0;
};

struct PointEstimate {
    Point x;
    double delta_bar = 0.0;
    double value = 0.0;
    std::size_t selected = 0;  ///< index of delta_bar in per_level
    std::vector<LevelEstimate> per_level;
    std::vector<FailedPair> failed_pairs;
};

/// Lepski rule on precomputed per-level estimates (grid order): the largest
/// delta with |f_delta - f_eta| <= psi(delta, eta) for every grid eta <= delta.
PointEstimate lepski_rule(std::span<const double> estimates, Point x, const BandwidthGrid& grid,
                          double mu, const EstimatorConfig& cfg);

/// Adaptive estimate f*(x) with its bandwidth. grid must be built for sg.n().
PointEstimate lepski_select(const Sinogram& sg, Point x, const BandwidthGrid& grid,
                            const EstimatorConfig& cfg);

nlohmann::json to_json(const PointEstimate& est);

/// Oracle bandwidth with the biases it was decided from.
struct OracleBandwidth {
    double delta = 0.0;
    std::size_t index = 0;
    std::vector<double> bias;  ///< |f_eta(x) - f(x)| per grid level
};

/// Largest grid delta with |f_eta(x) - f(x)| <= v(delta) lambda(delta) / 2 for
/// every grid eta <= delta. Requires d2 >= 20 L^2 / c* and ph.big_l() <= cfg.big_l.
OracleBandwidth oracle_bandwidth_detail(const Phantom& ph, Point x, const BandwidthGrid& grid,
                                        std::size_t n, const EstimatorConfig& cfg, double mu);
double oracle_bandwidth(const Phantom& ph, Point x, const BandwidthGrid& grid, std::size_t n,
                        const EstimatorConfig& cfg, double mu);

struct RateValue {
    double value = 0.0;
    double argmin = 1.0;
};

/// r_n(x, f) = inf_delta { sup_{eta <= delta} (f_eta(x) - f(x))^2 + c* delta^-3 log n / n }
/// over the geometric set a^{-m / refinement} in [log n / n, 1] plus the floor.
RateValue rate_functional(const Phantom& ph, Point x, std::size_t n, const EstimatorConfig& cfg,
                          double mu, int refinement = 8);

}  // namespace ertadapt
