#include "ertadapt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ertadapt/rng.hpp"

namespace ertadapt {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
    double sum = 0.0;
    for (double v : xs) sum += v;
    return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance needs at least two values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double v : xs) ss += (v - m) * (v - m);
    return ss / static_cast<double>(xs.size() - 1);
}

double standard_error(std::span<const double> xs) {
    return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

double mean_square(std::span<const double> errors) {
    if (errors.empty()) throw std::invalid_argument("mean square of an empty sample");
    double sum = 0.0;
    for (double e : errors) sum += e * e;
    return sum / static_cast<double>(errors.size());
}

double mean_square_se(std::span<const double> errors) {
    std::vector<double> sq(errors.size());
    std::transform(errors.begin(), errors.end(), sq.begin(), [](double e) { return e * e; });
    return standard_error(sq);
}

double variance_se(std::span<const double> xs) {
    const std::size_t r = xs.size();
    if (r < 4) throw std::invalid_argument("variance standard error needs at least four values");
    const double m = mean(xs);
    double m2 = 0.0, m4 = 0.0;
    for (double v : xs) {
        const double d2 = (v - m) * (v - m);
        m2 += d2;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(r);
    m2 /= n;
    m4 /= n;
    const double var_of_var = (m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n;
    return std::sqrt(std::max(0.0, var_of_var));
}

LineFit ols_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_fit: need >= 2 paired points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_fit: x values are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

namespace {

double reduce(std::span<const double> values, GroupStat stat) {
    return stat == GroupStat::Variance ? sample_variance(values) : mean_square(values);
}

}  // namespace

SlopeCI bootstrap_log_slope(std::span<const double> x, const std::vector<std::vector<double>>& groups,
                            GroupStat stat, std::size_t resamples, std::uint64_t seed, double level) {
    if (x.size() != groups.size()) throw std::invalid_argument("bootstrap: one group per x required");
    if (resamples < 2) throw std::invalid_argument("bootstrap: need at least two resamples");
    std::vector<double> logs(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) logs[k] = std::log(reduce(groups[k], stat));
    SlopeCI out;
    out.slope = ols_fit(x, logs).slope;

    std::vector<double> slopes;
    slopes.reserve(resamples);
    std::vector<double> draw;
    std::uint64_t counter = 0;
    for (std::size_t b = 0; b < resamples; ++b) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            const auto& g = groups[k];
            draw.resize(g.size());
            for (auto& v : draw) {
                const auto idx = static_cast<std::size_t>(uniform_open(seed, counter++, 3) *
                                                          static_cast<double>(g.size()));
                v = g[std::min(idx, g.size() - 1)];
            }
            logs[k] = std::log(reduce(draw, stat));
        }
        slopes.push_back(ols_fit(x, logs).slope);
    }
    const double alpha = (1.0 - level) / 2.0;
    out.lo = quantile(slopes, alpha);
    out.hi = quantile(slopes, 1.0 - alpha);
    out.sd = std::sqrt(sample_variance(slopes));
    return out;
}

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace ertadapt
