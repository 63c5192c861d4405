#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ertadapt/estimator.hpp"
#include "ertadapt/phantom.hpp"
#include "ertadapt/simulate.hpp"
#include "ertadapt/stats.hpp"

namespace ertadapt {

enum class CampaignMode { Calibrate, VarianceScan, RateScan, OracleCompare, Reconstruct };

CampaignMode parse_mode(const std::string& name);
std::string mode_name(CampaignMode mode);

struct Campaign {
    nlohmann::json phantom;  ///< phantom spec; a lepski_bump without h is rebuilt for each n
    double mu = 0.0;
    double sigma = 0.0;
    double a = 2.0;
    std::vector<Point> points{Point{}};
    std::vector<std::size_t> n_values;
    std::size_t replicates = 2;
    std::uint64_t seed = 0;
    CampaignMode mode = CampaignMode::RateScan;
    /// Bandwidths for the variance scan.
    std::vector<double> deltas{0.5, 0.25, 0.125, 0.0625, 0.03125};
    std::size_t bootstrap = 1000;
    std::size_t workers = 1;

    /// Throws std::domain_error naming the offending field.
    void validate() const;
    Phantom phantom_for(std::size_t n) const;
};

/// A named statistic checked against a closed band [lo, hi].
struct Assertion {
    std::string name;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
};

Assertion make_assertion(std::string name, double value, double lo, double hi);
bool all_pass(const std::vector<Assertion>& checks);

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CalibrationRow {
    double delta = 0.0;
    double variance = 0.0;
    double variance_se = 0.0;
    double implied_c_star = 0.0;  ///< variance * n * delta^3
    double v2 = 0.0;              ///< fitted c* delta^-3 / n
};

struct Calibration {
    EstimatorConfig cfg;
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::vector<CalibrationRow> table;
};

inline constexpr double kCalibrationHeadroom = 1.1;
inline constexpr double kCalibrationFloor = 1e-6;

/// Fits c* so that v^2(delta) >= 1.1 Var f_bar_delta(x0) at every grid delta,
/// and c** so that v^2(delta, eta) >= 1.1 Var(f_bar_delta - f_bar_eta) at every
/// grid pair; both floor at 1e-6. d2 = max(1, 20 L^2 / c*). Requires R >= 100.
Calibration calibrate_constants(const Phantom& ph, double mu, double sigma, std::size_t n,
                                std::size_t replicates, std::uint64_t seed, Point x0 = {},
                                double a = 2.0, std::size_t workers = 1);

/// est[r][p][j]: f_bar at bandwidth deltas[j], point p, replicate r. Replicate r
/// uses the sinogram seeded by derive_seed(seed, r, n).
using EstimateCube = std::vector<std::vector<std::vector<double>>>;
EstimateCube simulate_estimates(const Phantom& ph, double mu, double sigma, std::size_t n,
                                const std::vector<Point>& points, const std::vector<double>& deltas,
                                std::size_t replicates, std::uint64_t seed, std::size_t workers);

struct VarianceCell {
    std::size_t n = 0;
    Point x;
    double delta = 0.0;
    double variance = 0.0;
    double variance_se = 0.0;
};

struct SlopeRow {
    std::string against;  ///< "delta" or "n"
    Point x;
    double fixed = 0.0;   ///< the n (against delta) or delta (against n) held fixed
    SlopeCI slope;
};

struct VarianceReport {
    std::vector<VarianceCell> cells;
    std::vector<SlopeRow> slopes;
    std::vector<Assertion> checks;
};

/// Empirical variance of f_bar_delta over campaign.deltas x n_values, with
/// log-log slopes against delta (band [-3.3, -2.7]) and n (band [-1.2, -0.8]).
VarianceReport run_variance_scan(const Campaign& c);

struct RateCell {
    std::size_t n = 0;
    Point x;
    double mse = 0.0;
    double mse_se = 0.0;
    double mean_delta_bar = 0.0;
    double oracle_delta = 0.0;
    double oracle_mse = 0.0;
    double oracle_mse_se = 0.0;
    double rate = 0.0;  ///< r_n(x, f)
    double rate_argmin = 0.0;
    double frac_below = 0.0;  ///< fraction of replicates with delta_bar < delta_n / a^2
};

struct PointSlopes {
    Point x;
    SlopeCI raw;         ///< log MSE(f*) vs log n
    SlopeCI corrected;   ///< log of MSE (n / log n)^exponent vs log n
    SlopeCI oracle_ratio;    ///< log MSE(f_bar at delta_n) / r_n vs log n
    SlopeCI adaptive_ratio;  ///< log MSE(f*) / r_n vs log n
};

struct RateReport {
    double beta_eff = 0.0;
    double exponent = 0.0;  ///< (2 beta - 2) / (2 beta + 1)
    bool zero_signal = false;
    std::vector<RateCell> cells;
    std::vector<PointSlopes> slopes;
    std::vector<Assertion> checks;
};

/// Monte Carlo of the adaptive estimator and the oracle-bandwidth estimator
/// over campaign.n_values. Checks are filled by check_rate / check_oracle.
RateReport run_scan(const Campaign& c, const EstimatorConfig& cfg);

/// Adaptive rate: raw slope within 0.2 of -exponent and corrected slope within
/// 0.2 of 0 (or raw slope <= -0.8 for a zero phantom). Requires beta_eff > 1.
RateReport run_rate_scan(const Campaign& c, const EstimatorConfig& cfg);

/// Oracle inequality: ratio slopes vs log n within 0.15 of 0 and adaptive/oracle
/// MSE <= 10 at every n.
RateReport run_oracle_compare(const Campaign& c, const EstimatorConfig& cfg);

void add_rate_checks(RateReport& report);
void add_oracle_checks(RateReport& report);

struct ImageSpec {
    std::size_t width = 64;
    std::size_t height = 64;
    double extent = 1.0;  ///< pixels tile [-extent, extent]^2
};

struct Image {
    ImageSpec spec;
    std::vector<double> value;       ///< row-major, row 0 at y = +extent
    std::vector<double> delta_bar;
    Point pixel_center(std::size_t row, std::size_t col) const;
};

/// f*(x) and delta_bar(x) at every pixel center.
Image reconstruct_image(const Sinogram& sg, const ImageSpec& spec, const EstimatorConfig& cfg,
                        std::size_t workers = 1);

}  // namespace ertadapt
