#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ertadapt/estimator.hpp"
#include "ertadapt/rng.hpp"
#include "oracles.hpp"

using namespace ertadapt;

TEST_CASE("bandwidth grid") {
    const BandwidthGrid g = make_grid(4096, 2.0);
    CHECK(g.delta_min == doctest::Approx(std::log(4096.0) / 4096.0));
    REQUIRE(g.size() == 9);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(g.levels[j] == std::ldexp(1.0, -static_cast<int>(j)));
    CHECK(g.levels.back() >= g.delta_min);
    CHECK(g.levels.back() / 2.0 < g.delta_min);
    const BandwidthGrid g3 = make_grid(1000, 3.0);
    CHECK(g3.levels[2] == doctest::Approx(1.0 / 9.0));
    CHECK(make_grid(2, 2.0).size() >= 1);
}

TEST_CASE("grid errors name the minimal admissible n") {
    const double a = 8.0;
    const std::size_t n_min = minimal_admissible_n(a);
    CHECK(a * std::log(static_cast<double>(n_min)) / n_min <= 1.0);
    CHECK(a * std::log(static_cast<double>(n_min - 1)) / (n_min - 1) > 1.0);
    CHECK_NOTHROW(make_grid(n_min, a));
    try {
        make_grid(n_min - 1, a);
        FAIL("expected a domain error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("minimal admissible n is " + std::to_string(n_min)) != std::string::npos);
    }
    CHECK_THROWS_AS(make_grid(100, 1.5), std::domain_error);
    CHECK_THROWS_AS(make_grid(1, 2.0), std::domain_error);
    CHECK(minimal_admissible_n(2.0) == 2);
}

TEST_CASE("without attenuation the estimator is the classical filtered backprojection") {
    const Sinogram sg = sample_sinogram(Phantom::disk(0.5, 1.0), 2000, 0.0, 0.3, 5);
    const Point x{0.2, -0.1};
    for (double delta : {1.0, 0.25, 0.03125}) {
        double sum = 0.0;
        for (const auto& o : sg.samples) {
            const double u = x.x * std::cos(o.theta) + x.y * std::sin(o.theta) - o.s;
            sum += kernel_eval({0.0, delta}, u) * o.y;
        }
        CHECK(kernel_estimate(sg, x, delta) == sum * (1.0 / 2000.0));
    }
}

TEST_CASE("multi-level estimates agree with single-level ones") {
    const Sinogram sg = sample_sinogram(Phantom::poly_bump(2.0, 1.0), 3000, 0.6, 0.3, 8);
    const BandwidthGrid g = make_grid(sg.n(), 2.0);
    const Point x{0.35, 0.2};
    const auto all = kernel_estimates(sg, x, g.levels);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(all[j] == kernel_estimate(sg, x, g.levels[j]));
}

TEST_CASE("attenuation weight uses the counterclockwise perpendicular") {
    Sinogram sg;
    sg.mu = 0.9;
    sg.samples = {{0.3, 0.1, 2.0}};
    const Point x{0.4, -0.2};
    const double weight = std::exp(-0.9 * (-x.x * std::sin(0.3) + x.y * std::cos(0.3)));
    const double u = x.x * std::cos(0.3) + x.y * std::sin(0.3) - 0.1;
    CHECK(kernel_estimate(sg, x, 0.5) == doctest::Approx(weight * kernel_eval({0.9, 0.5}, u) * 2.0).epsilon(1e-15));
}

TEST_CASE("zero data selects the largest bandwidth") {
    const Sinogram sg = sample_sinogram(Phantom::disk(0.5, 0.0), 1024, 0.5, 0.0, 1);
    const BandwidthGrid g = make_grid(sg.n(), 2.0);
    const PointEstimate pe = lepski_select(sg, {0.1, 0.1}, g, EstimatorConfig{});
    CHECK(pe.delta_bar == 1.0);
    CHECK(pe.value == 0.0);
    CHECK(pe.failed_pairs.empty());
    CHECK_THROWS_AS(lepski_select(sg, {}, make_grid(2048, 2.0), EstimatorConfig{}), std::invalid_argument);
}

namespace {

void check_lepski_sound(const std::vector<double>& est, const BandwidthGrid& g, double mu,
                        const EstimatorConfig& cfg, const PointEstimate& pe) {
    const std::size_t sel = pe.selected;
    REQUIRE(g.levels[sel] == pe.delta_bar);
    REQUIRE(est[sel] == pe.value);
    for (std::size_t k = sel + 1; k < g.size(); ++k)
        REQUIRE(std::abs(est[sel] - est[k]) <= psi_stat(g.levels[sel], g.levels[k], g.n, mu, cfg));
    for (std::size_t j = 0; j < sel; ++j) {
        bool fails = false;
        for (std::size_t k = j + 1; k < g.size(); ++k)
            fails = fails || std::abs(est[j] - est[k]) > psi_stat(g.levels[j], g.levels[k], g.n, mu, cfg);
        REQUIRE(fails);
    }
    REQUIRE(pe.failed_pairs.size() == sel);
    for (std::size_t j = 0; j < sel; ++j) {
        REQUIRE(pe.failed_pairs[j].delta == g.levels[j]);
        REQUIRE(pe.failed_pairs[j].diff > pe.failed_pairs[j].psi);
    }
}

}  // namespace

TEST_CASE("Lepski rule soundness on randomized instances") {
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const std::size_t n = 64 + static_cast<std::size_t>(uniform_open(11, i, 0) * 100000);
        const BandwidthGrid g = make_grid(n, 2.0 + std::floor(uniform_open(11, i, 1) * 3.0));
        EstimatorConfig cfg;
        cfg.c_star = std::exp(-4.0 + 8.0 * uniform_open(11, i, 2));
        cfg.c_dstar = std::exp(-4.0 + 8.0 * uniform_open(11, i, 3));
        cfg.d2 = std::exp(-2.0 + 6.0 * uniform_open(11, i, 4));
        const double mu = -2.0 + 4.0 * uniform_open(11, i, 5);
        const double scale = std::exp(-6.0 + 10.0 * uniform_open(11, i, 6));
        std::vector<double> est(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) est[j] = scale * standard_normal(11, i * 64 + j, 7);
        const PointEstimate pe = lepski_rule(est, {}, g, mu, cfg);
        check_lepski_sound(est, g, mu, cfg, pe);
    }
}

TEST_CASE("Lepski rule soundness on simulated data") {
    const Phantom ph = Phantom::poly_bump(2.0, 1.0);
    EstimatorConfig cfg;
    cfg.c_star = 0.1;
    cfg.c_dstar = 0.9;
    cfg.d2 = 2.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Sinogram sg = sample_sinogram(ph, 4096, 0.5, 0.5, seed);
        const BandwidthGrid g = make_grid(sg.n(), 2.0);
        const Point x{0.35 * (seed % 3), 0.0};
        const auto est = kernel_estimates(sg, x, g.levels);
        check_lepski_sound(est, g, sg.mu, cfg, lepski_select(sg, x, g, cfg));
    }
}

TEST_CASE("point estimate JSON") {
    const Sinogram sg = sample_sinogram(Phantom::poly_bump(2.0, 1.0), 512, 0.5, 0.1, 2);
    const BandwidthGrid g = make_grid(sg.n(), 2.0);
    const PointEstimate pe = lepski_select(sg, {0.0, 0.5}, g, EstimatorConfig{});
    const auto j = to_json(pe);
    CHECK(j["delta_bar"] == pe.delta_bar);
    CHECK(j["value"] == pe.value);
    CHECK(j["per_level"].size() == g.size());
    CHECK(j["x"][1] == 0.5);
    CHECK(j["failed_pairs"].size() == pe.failed_pairs.size());
}

TEST_CASE("oracle bandwidth") {
    const Phantom ph = Phantom::poly_bump(2.0, 1.0);
    EstimatorConfig cfg;
    cfg.c_star = 1.0;
    cfg.d2 = 20.0;
    const std::size_t n = 16384;
    const BandwidthGrid g = make_grid(n, 2.0);
    const Point x{};
    const auto ob = oracle_bandwidth_detail(ph, x, g, n, cfg, 0.5);
    // brute-force check of the definition
    const double fx = ph.eval(x);
    for (std::size_t j = 0; j <= ob.index; ++j) {
        const double thr = v_stat(g.levels[j], n, cfg) * lambda_stat(g.levels[j], cfg) / 2.0;
        bool ok = true;
        for (std::size_t k = j; k < g.size(); ++k) ok = ok && std::abs(ph.smoothed(x, g.levels[k]) - fx) <= thr;
        CHECK(ok == (j == ob.index));
    }
    CHECK(oracle_bandwidth(ph, x, g, n, cfg, 0.0) == ob.delta);

    cfg.d2 = 19.0;
    CHECK_THROWS_AS(oracle_bandwidth(ph, x, g, n, cfg, 0.5), std::domain_error);
    cfg.d2 = 20.0;
    cfg.big_l = 0.5;
    CHECK_THROWS_AS(oracle_bandwidth(ph, x, g, n, cfg, 0.5), std::domain_error);
    cfg.big_l = 1.0;
    CHECK(oracle_bandwidth(Phantom::disk(0.5, 0.0), x, g, n, cfg, 0.5) == 1.0);
}

TEST_CASE("rate functional against an extended-precision brute force") {
    const Phantom ph = Phantom::poly_bump(2.0, 1.0);
    EstimatorConfig cfg;
    cfg.c_star = 0.05;
    for (std::size_t n : {4096u, 65536u}) {
        const RateValue rv = rate_functional(ph, {}, n, cfg, 0.5);
        const long double nn = static_cast<long double>(n);
        const long double floor = std::log(nn) / nn;
        long double best = 1e300L, arg = 1.0L;
        std::vector<long double> deltas;
        for (int m = 0;; ++m) {
            const long double d = std::pow(2.0L, -m / 8.0L);
            if (d < floor) break;
            deltas.push_back(d);
        }
        deltas.push_back(floor);
        std::vector<long double> bias2;
        for (long double v : oracle::poly_lowpass_levels(2.0L, 1.0L, 0.0L, deltas)) bias2.push_back((v - 1.0L) * (v - 1.0L));
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            long double sup = 0.0L;
            for (std::size_t k = i; k < deltas.size(); ++k) sup = std::max(sup, bias2[k]);
            const long double v = sup + 0.05L * std::log(nn) / nn / (deltas[i] * deltas[i] * deltas[i]);
            if (v < best) best = v, arg = deltas[i];
        }
        CHECK(rv.value == doctest::Approx(static_cast<double>(best)).epsilon(1e-9));
        CHECK(rv.argmin == doctest::Approx(static_cast<double>(arg)).epsilon(1e-12));
    }
}

TEST_CASE("rate functional decreases in n") {
    const Phantom ph = Phantom::poly_bump(2.0, 1.0);
    EstimatorConfig cfg;
    double prev = INFINITY;
    for (std::size_t n = 1024; n <= 1 << 18; n *= 4) {
        const RateValue rv = rate_functional(ph, {0.35, 0.2}, n, cfg, 0.0);
        CHECK(rv.value < prev);
        CHECK(rv.argmin >= std::log(static_cast<double>(n)) / n);
        prev = rv.value;
    }
    CHECK_THROWS_AS(rate_functional(ph, {}, 1000, cfg, 0.0, 0), std::domain_error);
}
