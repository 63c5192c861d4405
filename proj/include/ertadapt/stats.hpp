#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ertadapt {

double mean(std::span<const double> xs);
/// Unbiased sample variance; requires at least two values.
double sample_variance(std::span<const double> xs);
/// Standard error of the mean.
double standard_error(std::span<const double> xs);
/// Mean of squares and its standard error (for MSE from signed errors).
double mean_square(std::span<const double> errors);
double mean_square_se(std::span<const double> errors);

/// Standard error of the unbiased sample variance, from the fourth central moment.
double variance_se(std::span<const double> xs);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope * x, unweighted.
LineFit ols_fit(std::span<const double> x, std::span<const double> y);

struct SlopeCI {
    double slope = 0.0;  ///< fit on the full data
    double lo = 0.0;
    double hi = 0.0;
    double sd = 0.0;     ///< bootstrap standard deviation of the slope
};

/// Replicate bootstrap for a slope of log(statistic) against x.
///
/// groups[k] holds the replicate values observed at x[k]; each bootstrap draw
/// resamples every group with replacement, reduces it with `stat` and refits
/// the line through (x[k], log stat_k). Resampling indices come from the
/// counter stream of `seed`, so the interval is reproducible.
enum class GroupStat { Variance, MeanSquare };
SlopeCI bootstrap_log_slope(std::span<const double> x, const std::vector<std::vector<double>>& groups,
                            GroupStat stat, std::size_t resamples, std::uint64_t seed,
                            double level = 0.95);

/// Empirical quantile with linear interpolation, q in [0, 1].
double quantile(std::vector<double> xs, double q);

}  // namespace ertadapt
