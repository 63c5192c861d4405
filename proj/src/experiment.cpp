#include "ertadapt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ertadapt/parallel.hpp"
#include "ertadapt/rng.hpp"

namespace ertadapt {

namespace {

constexpr std::uint64_t kBootstrapTag = 0xB0075742ULL;

std::vector<double> column(const EstimateCube& cube, std::size_t p, std::size_t j) {
    std::vector<double> out;
    out.reserve(cube.size());
    for (const auto& rep : cube) out.push_back(rep[p][j]);
    return out;
}

SlopeCI shifted(SlopeCI ci, double shift) {
    ci.slope += shift;
    ci.lo += shift;
    ci.hi += shift;
    return ci;
}

std::vector<double> log_values(const std::vector<std::size_t>& ns) {
    std::vector<double> out;
    for (auto n : ns) out.push_back(std::log(static_cast<double>(n)));
    return out;
}

}  // namespace

CampaignMode parse_mode(const std::string& name) {
    if (name == "calibrate") return CampaignMode::Calibrate;
    if (name == "variance_scan") return CampaignMode::VarianceScan;
    if (name == "rate_scan") return CampaignMode::RateScan;
    if (name == "oracle_compare") return CampaignMode::OracleCompare;
    if (name == "reconstruct") return CampaignMode::Reconstruct;
    throw std::domain_error("campaign.mode: unknown mode '" + name + "'");
}

std::string mode_name(CampaignMode mode) {
    switch (mode) {
        case CampaignMode::Calibrate: return "calibrate";
        case CampaignMode::VarianceScan: return "variance_scan";
        case CampaignMode::RateScan: return "rate_scan";
        case CampaignMode::OracleCompare: return "oracle_compare";
        case CampaignMode::Reconstruct: return "reconstruct";
    }
    return "unknown";
}

void Campaign::validate() const {
    if (!std::isfinite(mu)) throw std::domain_error("noise.mu must be finite");
    if (!(sigma >= 0.0)) throw std::domain_error("noise.sigma must be ≥ 0");
    if (!(a >= 2.0)) throw std::domain_error("grid.a must be ≥ 2");
    if (points.empty()) throw std::domain_error("campaign.points must not be empty");
    for (const auto& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::domain_error("campaign.points must be finite");
    if (mode != CampaignMode::Reconstruct && n_values.empty())
        throw std::domain_error("campaign.n_values must not be empty");
    for (auto n : n_values) make_grid(n, a);
    if (replicates < 2) throw std::domain_error("campaign.replicates must be ≥ 2");
    for (double d : deltas)
        if (!(d > 0.0 && d <= 1.0)) throw std::domain_error("campaign.deltas must lie in (0, 1]");
    if (bootstrap < 2) throw std::domain_error("campaign.bootstrap must be ≥ 2");
    phantom_for(n_values.empty() ? 2 : n_values.front());
}

Phantom Campaign::phantom_for(std::size_t n) const {
    nlohmann::json spec = phantom;
    if (spec.is_object() && spec.value("kind", "") == "lepski_bump") {
        auto& params = spec["params"];
        if (params.is_object() && !params.contains("h") && !params.contains("n"))
            params["n"] = static_cast<double>(n);
    }
    return Phantom::from_json(spec);
}

Assertion make_assertion(std::string name, double value, double lo, double hi) {
    return {std::move(name), value, lo, hi, value >= lo && value <= hi};
}

bool all_pass(const std::vector<Assertion>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Assertion& a) { return a.pass; });
}

EstimateCube simulate_estimates(const Phantom& ph, double mu, double sigma, std::size_t n,
                                const std::vector<Point>& points, const std::vector<double>& deltas,
                                std::size_t replicates, std::uint64_t seed, std::size_t workers) {
    EstimateCube cube(replicates);
    parallel_for(replicates, workers, [&](std::size_t r) {
        const Sinogram sg = sample_sinogram(ph, n, mu, sigma, derive_seed(seed, r, n));
        auto& rep = cube[r];
        rep.reserve(points.size());
        for (const auto& x : points) rep.push_back(kernel_estimates(sg, x, deltas));
    });
    return cube;
}

Calibration calibrate_constants(const Phantom& ph, double mu, double sigma, std::size_t n,
                                std::size_t replicates, std::uint64_t seed, Point x0, double a,
                                std::size_t workers) {
    if (replicates < 100) throw std::invalid_argument("calibration needs R ≥ 100 replicates");
    if (!(sigma >= 0.0)) throw std::domain_error("noise.sigma must be ≥ 0");
    const BandwidthGrid grid = make_grid(n, a);
    const auto cube = simulate_estimates(ph, mu, sigma, n, {x0}, grid.levels, replicates, seed, workers);
    const double nn = static_cast<double>(n);

    auto check_stable = [&](double var, double se, const std::string& what) {
        if (var > 0.0 && se / var > 0.2) {
            std::ostringstream msg;
            msg << "calibration failure: relative SE of the variance of " << what << " is "
                << se / var << " > 0.2 (variance " << var << ", SE " << se << ", R = " << replicates
                << "); increase R";
            throw CalibrationError(msg.str());
        }
    };

    Calibration out;
    out.n = n;
    out.replicates = replicates;
    std::vector<std::vector<double>> cols;
    double c_star = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        cols.push_back(column(cube, 0, j));
        const double d = grid.levels[j];
        CalibrationRow row;
        row.delta = d;
        row.variance = sample_variance(cols.back());
        row.variance_se = variance_se(cols.back());
        check_stable(row.variance, row.variance_se, "f_bar at delta = " + std::to_string(d));
        row.implied_c_star = row.variance * nn * d * d * d;
        c_star = std::max(c_star, kCalibrationHeadroom * row.implied_c_star);
        out.table.push_back(row);
    }
    double c_dstar = 0.0;
    std::vector<double> diff(replicates);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        for (std::size_t k = j + 1; k < grid.size(); ++k) {
            for (std::size_t r = 0; r < replicates; ++r) diff[r] = cols[j][r] - cols[k][r];
            const double var = sample_variance(diff);
            check_stable(var, variance_se(diff),
                         "f_bar differences at (" + std::to_string(grid.levels[j]) + ", " +
                             std::to_string(grid.levels[k]) + ")");
            const double cross = kernel_l2_cross(mu, grid.levels[j], grid.levels[k]);
            c_dstar = std::max(c_dstar, kCalibrationHeadroom * var * nn / cross);
        }
    }
    out.cfg.c_star = std::max(kCalibrationFloor, c_star);
    out.cfg.c_dstar = std::max(kCalibrationFloor, c_dstar);
    out.cfg.big_l = ph.big_l();
    out.cfg.d2 = default_d2(out.cfg.c_star, out.cfg.big_l);
    out.cfg.a = a;
    out.cfg.sigma = sigma;
    for (auto& row : out.table) row.v2 = out.cfg.c_star / (row.delta * row.delta * row.delta) / nn;
    return out;
}

VarianceReport run_variance_scan(const Campaign& c) {
    c.validate();
    VarianceReport report;
    const auto& pts = c.points;
    // groups[p][j][k]: replicate values at point p, delta j, n_values[k]
    std::vector<std::vector<std::vector<std::vector<double>>>> groups(
        pts.size(), std::vector<std::vector<std::vector<double>>>(c.deltas.size()));
    for (std::size_t k = 0; k < c.n_values.size(); ++k) {
        const std::size_t n = c.n_values[k];
        const Phantom ph = c.phantom_for(n);
        const auto cube =
            simulate_estimates(ph, c.mu, c.sigma, n, pts, c.deltas, c.replicates, c.seed, c.workers);
        for (std::size_t p = 0; p < pts.size(); ++p) {
            for (std::size_t j = 0; j < c.deltas.size(); ++j) {
                auto col = column(cube, p, j);
                report.cells.push_back({n, pts[p], c.deltas[j], sample_variance(col),
                                        c.replicates >= 4 ? variance_se(col) : 0.0});
                groups[p][j].push_back(std::move(col));
            }
        }
    }
    std::vector<double> log_delta;
    for (double d : c.deltas) log_delta.push_back(std::log(d));
    const auto log_n = log_values(c.n_values);
    std::uint64_t tag = 0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        if (c.deltas.size() >= 2) {
            for (std::size_t k = 0; k < c.n_values.size(); ++k) {
                std::vector<std::vector<double>> g;
                for (std::size_t j = 0; j < c.deltas.size(); ++j) g.push_back(groups[p][j][k]);
                const auto ci = bootstrap_log_slope(log_delta, g, GroupStat::Variance, c.bootstrap,
                                                    derive_seed(c.seed, kBootstrapTag, tag++));
                report.slopes.push_back({"delta", pts[p], static_cast<double>(c.n_values[k]), ci});
                std::ostringstream name;
                name << "variance slope vs delta (n=" << c.n_values[k] << ", x=(" << pts[p].x << ","
                     << pts[p].y << "))";
                report.checks.push_back(make_assertion(name.str(), ci.slope, -3.3, -2.7));
            }
        }
        if (c.n_values.size() >= 2) {
            for (std::size_t j = 0; j < c.deltas.size(); ++j) {
                const auto ci = bootstrap_log_slope(log_n, groups[p][j], GroupStat::Variance,
                                                    c.bootstrap, derive_seed(c.seed, kBootstrapTag, tag++));
                report.slopes.push_back({"n", pts[p], c.deltas[j], ci});
                std::ostringstream name;
                name << "variance slope vs n (delta=" << c.deltas[j] << ", x=(" << pts[p].x << ","
                     << pts[p].y << "))";
                report.checks.push_back(make_assertion(name.str(), ci.slope, -1.2, -0.8));
            }
        }
    }
    return report;
}

RateReport run_scan(const Campaign& c, const EstimatorConfig& cfg_in) {
    c.validate();
    if (c.n_values.size() < 2) throw std::domain_error("campaign.n_values needs at least two sizes");
    EstimatorConfig cfg = cfg_in;
    cfg.a = c.a;
    cfg.validate();
    RateReport report;
    const Phantom first = c.phantom_for(c.n_values.front());
    report.zero_signal = first.certified_sup() == 0.0;
    report.beta_eff = first.effective_smoothness();
    report.exponent = (2.0 * report.beta_eff - 2.0) / (2.0 * report.beta_eff + 1.0);

    const auto& pts = c.points;
    std::vector<std::vector<std::vector<double>>> adaptive(pts.size()), oracle(pts.size());
    std::vector<std::vector<double>> log_rate(pts.size());
    for (const std::size_t n : c.n_values) {
        const Phantom ph = c.phantom_for(n);
        const BandwidthGrid grid = make_grid(n, c.a);
        const auto cube =
            simulate_estimates(ph, c.mu, c.sigma, n, pts, grid.levels, c.replicates, c.seed, c.workers);
        for (std::size_t p = 0; p < pts.size(); ++p) {
            const Point x = pts[p];
            const double fx = ph.eval(x);
            const auto ob = oracle_bandwidth_detail(ph, x, grid, n, cfg, c.mu);
            const auto rn = rate_functional(ph, x, n, cfg, c.mu);
            std::vector<double> err(c.replicates), oerr(c.replicates);
            double delta_sum = 0.0;
            std::size_t below = 0;
            const double below_cut = ob.delta / (c.a * c.a);
            for (std::size_t r = 0; r < c.replicates; ++r) {
                const auto pe = lepski_rule(cube[r][p], x, grid, c.mu, cfg);
                err[r] = pe.value - fx;
                oerr[r] = cube[r][p][ob.index] - fx;
                delta_sum += pe.delta_bar;
                if (pe.delta_bar < below_cut) ++below;
            }
            RateCell cell;
            cell.n = n;
            cell.x = x;
            cell.mse = mean_square(err);
            cell.mse_se = mean_square_se(err);
            cell.mean_delta_bar = delta_sum / static_cast<double>(c.replicates);
            cell.oracle_delta = ob.delta;
            cell.oracle_mse = mean_square(oerr);
            cell.oracle_mse_se = mean_square_se(oerr);
            cell.rate = rn.value;
            cell.rate_argmin = rn.argmin;
            cell.frac_below = static_cast<double>(below) / static_cast<double>(c.replicates);
            report.cells.push_back(cell);
            adaptive[p].push_back(std::move(err));
            oracle[p].push_back(std::move(oerr));
            log_rate[p].push_back(std::log(rn.value));
        }
    }

    const auto log_n = log_values(c.n_values);
    std::vector<double> log_corr;
    for (auto n : c.n_values) {
        const double nn = static_cast<double>(n);
        log_corr.push_back(report.exponent * std::log(nn / std::log(nn)));
    }
    const double corr_shift = ols_fit(log_n, log_corr).slope;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        PointSlopes s;
        s.x = pts[p];
        s.raw = bootstrap_log_slope(log_n, adaptive[p], GroupStat::MeanSquare, c.bootstrap,
                                    derive_seed(c.seed, kBootstrapTag, 2 * p));
        const auto oracle_ci = bootstrap_log_slope(log_n, oracle[p], GroupStat::MeanSquare, c.bootstrap,
                                                   derive_seed(c.seed, kBootstrapTag, 2 * p + 1));
        const double rate_slope = ols_fit(log_n, log_rate[p]).slope;
        s.corrected = shifted(s.raw, corr_shift);
        s.oracle_ratio = shifted(oracle_ci, -rate_slope);
        s.adaptive_ratio = shifted(s.raw, -rate_slope);
        report.slopes.push_back(s);
    }
    return report;
}

void add_rate_checks(RateReport& report) {
    for (const auto& s : report.slopes) {
        std::ostringstream at;
        at << " at x=(" << s.x.x << "," << s.x.y << ")";
        if (report.zero_signal) {
            report.checks.push_back(make_assertion("raw MSE slope" + at.str(), s.raw.slope,
                                                   -std::numeric_limits<double>::infinity(), -0.8));
            continue;
        }
        report.checks.push_back(make_assertion("raw MSE slope" + at.str(), s.raw.slope,
                                               -report.exponent - 0.2, -report.exponent + 0.2));
        report.checks.push_back(
            make_assertion("log-corrected MSE slope" + at.str(), s.corrected.slope, -0.2, 0.2));
    }
}

void add_oracle_checks(RateReport& report) {
    for (const auto& s : report.slopes) {
        std::ostringstream at;
        at << " at x=(" << s.x.x << "," << s.x.y << ")";
        report.checks.push_back(
            make_assertion("oracle MSE / r_n slope" + at.str(), s.oracle_ratio.slope, -0.15, 0.15));
        report.checks.push_back(
            make_assertion("adaptive MSE / r_n slope" + at.str(), s.adaptive_ratio.slope, -0.15, 0.15));
    }
    for (const auto& cell : report.cells) {
        std::ostringstream at;
        at << " at n=" << cell.n << ", x=(" << cell.x.x << "," << cell.x.y << ")";
        const double ratio = cell.oracle_mse > 0.0 ? cell.mse / cell.oracle_mse
                                                   : (cell.mse > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
        report.checks.push_back(make_assertion("adaptive / oracle MSE" + at.str(), ratio, 0.0, 10.0));
        report.checks.push_back(
            make_assertion("fraction delta_bar < delta_n / a^2" + at.str(), cell.frac_below, 0.0, 0.1));
    }
}

RateReport run_rate_scan(const Campaign& c, const EstimatorConfig& cfg) {
    const Phantom first = c.phantom_for(c.n_values.empty() ? 2 : c.n_values.front());
    if (first.certified_sup() != 0.0 && !first.is_rate_regime()) {
        throw std::domain_error("rate scan needs a phantom with effective smoothness > 1, got " +
                                std::to_string(first.effective_smoothness()));
    }
    RateReport report = run_scan(c, cfg);
    add_rate_checks(report);
    return report;
}

RateReport run_oracle_compare(const Campaign& c, const EstimatorConfig& cfg) {
    RateReport report = run_scan(c, cfg);
    add_oracle_checks(report);
    return report;
}

Point Image::pixel_center(std::size_t row, std::size_t col) const {
    const double dx = 2.0 * spec.extent / static_cast<double>(spec.width);
    const double dy = 2.0 * spec.extent / static_cast<double>(spec.height);
    return {-spec.extent + (static_cast<double>(col) + 0.5) * dx,
            spec.extent - (static_cast<double>(row) + 0.5) * dy};
}

Image reconstruct_image(const Sinogram& sg, const ImageSpec& spec, const EstimatorConfig& cfg,
                        std::size_t workers) {
    if (spec.width == 0 || spec.height == 0) throw std::domain_error("image size must be positive");
    if (!(spec.extent > 0.0 && spec.extent <= 1.0))
        throw std::domain_error("pixel grid must lie inside [-1, 1]^2");
    cfg.validate();
    const BandwidthGrid grid = make_grid(sg.n(), cfg.a);
    Image img;
    img.spec = spec;
    const std::size_t count = spec.width * spec.height;
    img.value.resize(count);
    img.delta_bar.resize(count);
    parallel_for(count, workers, [&](std::size_t i) {
        const Point x = img.pixel_center(i / spec.width, i % spec.width);
        const auto pe = lepski_select(sg, x, grid, cfg);
        img.value[i] = pe.value;
        img.delta_bar[i] = pe.delta_bar;
    });
    return img;
}

}  // namespace ertadapt
