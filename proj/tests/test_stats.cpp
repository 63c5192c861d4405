#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ertadapt/rng.hpp"
#include "ertadapt/stats.hpp"

using namespace ertadapt;

TEST_CASE("moments") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    CHECK(mean(x) == 2.5);
    CHECK(sample_variance(x) == doctest::Approx(5.0 / 3.0));
    CHECK(standard_error(x) == doctest::Approx(std::sqrt(5.0 / 12.0)));
    CHECK(mean_square(std::vector<double>{3.0, -4.0}) == 12.5);
    CHECK_THROWS_AS(sample_variance(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(mean(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("variance standard error for normal samples") {
    std::vector<double> z(40000);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = standard_normal(3, i, 0);
    // Var(s^2) = 2 sigma^4 / (n - 1) for normal data
    CHECK(variance_se(z) == doctest::Approx(std::sqrt(2.0 / 39999.0)).epsilon(0.05));
}

TEST_CASE("least squares recovers an exact line") {
    const std::vector<double> x{0.0, 1.0, 2.0, 5.0};
    std::vector<double> y;
    for (double v : x) y.push_back(1.5 - 0.75 * v);
    const LineFit f = ols_fit(x, y);
    CHECK(f.slope == doctest::Approx(-0.75));
    CHECK(f.intercept == doctest::Approx(1.5));
    CHECK_THROWS_AS(ols_fit(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("quantiles interpolate linearly") {
    const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
    CHECK(quantile(x, 0.0) == 1.0);
    CHECK(quantile(x, 1.0) == 4.0);
    CHECK(quantile(x, 0.5) == 2.5);
    CHECK_THROWS_AS(quantile(x, 1.5), std::invalid_argument);
}

namespace {

// groups[k] ~ N(0, var_k) with var_k = n_k^-1, so log-variance slope vs log n is -1.
std::vector<std::vector<double>> scaled_groups(std::size_t r, std::uint64_t seed) {
    std::vector<std::vector<double>> g;
    for (int k = 0; k < 4; ++k) {
        const double sd = std::pow(2.0, -k / 2.0);
        std::vector<double> v(r);
        for (std::size_t i = 0; i < r; ++i) v[i] = sd * standard_normal(seed, k * 100000 + i, 0);
        g.push_back(v);
    }
    return g;
}

}  // namespace

TEST_CASE("bootstrap slope interval is reproducible and covers the truth") {
    std::vector<double> x;
    for (int k = 0; k < 4; ++k) x.push_back(k * std::log(2.0));
    const auto g = scaled_groups(400, 5);
    const SlopeCI a = bootstrap_log_slope(x, g, GroupStat::Variance, 1000, 77);
    const SlopeCI b = bootstrap_log_slope(x, g, GroupStat::Variance, 1000, 77);
    CHECK(a.slope == b.slope);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.lo < -1.0);
    CHECK(a.hi > -1.0);
    CHECK(a.lo < a.slope);
    CHECK(a.slope < a.hi);
}

TEST_CASE("bootstrap interval narrows like 1/sqrt(R)") {
    std::vector<double> x;
    for (int k = 0; k < 4; ++k) x.push_back(k * std::log(2.0));
    const SlopeCI small = bootstrap_log_slope(x, scaled_groups(400, 9), GroupStat::Variance, 1000, 1);
    const SlopeCI large = bootstrap_log_slope(x, scaled_groups(1600, 9), GroupStat::Variance, 1000, 1);
    const double ratio = (small.hi - small.lo) / (large.hi - large.lo);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.3));
}
