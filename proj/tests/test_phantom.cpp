#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "ertadapt/phantom.hpp"
#include "oracles.hpp"

using namespace ertadapt;
using std::numbers::pi;

namespace {

const double kThetas[] = {0.0, 0.4, 1.3, 2.9, 4.1, 5.9};
const double kOffsets[] = {-0.95, -0.6, -0.2, 0.0, 0.31, 0.74, 0.999};

// Chord integral of the bump by tanh-sinh, with t measured along the
// perpendicular from the origin.
double bump_ert_oracle(const LepskiBump& b, LineCoords line, double mu) {
    const Point dir = line.direction();
    const Point perp = line.perpendicular();
    const double d = line.s - (b.x0.x * dir.x + b.x0.y * dir.y);
    if (std::abs(d) >= b.h) return 0.0;
    const double t0 = b.x0.x * perp.x + b.x0.y * perp.y;
    const double half = std::sqrt(b.h * b.h - d * d);
    const double peak = b.amplitude * std::pow(b.h, b.beta1 - 1.0);
    auto f = [&](double tau) {
        const double u2 = (d * d + tau * tau) / (b.h * b.h);
        if (u2 >= 1.0) return 0.0;
        return peak * std::exp(1.0 - 1.0 / (1.0 - u2)) * std::exp(mu * (t0 + tau));
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, -half, half);
}

}  // namespace

TEST_CASE("disk transform: closed form against chord quadrature") {
    const Phantom ph = Phantom::disk(0.7, 1.3);
    for (double mu : {0.0, 0.5, 1.0, -0.7}) {
        for (double th : kThetas) {
            for (double s : kOffsets) {
                const LineCoords line{th, s};
                CHECK(std::abs(ph.ert(line, mu) - ph.ert_quadrature(line, mu)) <= 1e-8);
            }
        }
    }
}

TEST_CASE("disk transform at mu = 0 is the Radon transform") {
    const double r0 = 0.7;
    const Phantom ph = Phantom::disk(r0, 1.0);
    for (double s : kOffsets) {
        const double expected = std::abs(s) < r0 ? 2.0 * std::sqrt(r0 * r0 - s * s) : 0.0;
        CHECK(std::abs(ph.ert({1.1, s}, 0.0) - expected) <= 1e-12);
    }
}

TEST_CASE("polynomial bump transform against the Bessel closed form and quadrature") {
    for (double p : {1.0, 2.0, 3.5}) {
        const Phantom ph = Phantom::poly_bump(p, 0.8);
        for (double mu : {0.0, 0.5, 1.0, -1.5}) {
            for (double s : kOffsets) {
                const LineCoords line{2.0, s};
                const double expected = oracle::poly_ert(p, 0.8, s, mu);
                CHECK(ph.ert(line, mu) == doctest::Approx(expected).epsilon(1e-12));
                CHECK(std::abs(ph.ert_quadrature(line, mu) - expected) <= 1e-10);
            }
        }
    }
}

TEST_CASE("bump transform against tanh-sinh quadrature") {
    const LepskiBump b{0.5, 1.5, 0.3, {0.2, -0.1}};
    const Phantom ph(b);
    for (double mu : {0.0, 0.8}) {
        for (double th : kThetas) {
            for (double s : {-0.3, -0.1, 0.0, 0.05, 0.12}) {
                const LineCoords line{th, s};
                CHECK(std::abs(ph.ert(line, mu) - bump_ert_oracle(b, line, mu)) <= 1e-11);
            }
        }
    }
}

TEST_CASE("transform vanishes on lines missing the support") {
    CHECK(Phantom::disk(0.5, 1.0).ert({0.3, 0.6}, 0.5) == 0.0);
    CHECK(Phantom::poly_bump(2.0, 1.0).ert({0.3, 1.0}, 0.5) == 0.0);
    CHECK(Phantom::lepski_bump(0.5, 1.5, 0.2, {0.5, 0.5}).ert({0.0, -0.5}, 0.5) == 0.0);
}

TEST_CASE("smoothed disk at its center") {
    const double r0 = 0.6, amp = 1.7;
    const Phantom ph = Phantom::disk(r0, amp);
    for (double eta : {1.0, 0.5, 0.125, 0.03125, 0.004}) {
        const double expected = amp * (1.0 - std::cyl_bessel_j(0.0, r0 / eta));
        CHECK(ph.smoothed({0.0, 0.0}, eta) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("smoothed polynomial bump against extended-precision Hankel quadrature") {
    const Phantom ph = Phantom::poly_bump(2.0, 1.0);
    for (double dist : {0.0, 0.4031128874149275}) {
        for (double eta : {1.0, 0.25, 0.0625, 0.015625}) {
            const double expected = static_cast<double>(oracle::poly_lowpass(2.0L, 1.0L, dist, eta));
            const Point x{dist * 0.8682431421244593, dist * 0.49613893835683387};
            CHECK(ph.smoothed(x, eta) == doctest::Approx(expected).epsilon(1e-11));
        }
    }
}

TEST_CASE("smoothed value equals the expectation integral for every mu") {
    const Phantom phantoms[] = {Phantom::disk(0.5, 1.0), Phantom::poly_bump(2.0, 1.0),
                                Phantom::lepski_bump(0.5, 1.5, 0.35, {0.1, 0.2})};
    const Point xs[] = {{0.0, 0.0}, {0.35, 0.2}};
    for (const auto& ph : phantoms) {
        for (Point x : xs) {
            for (double eta : {0.5, 0.25}) {
                const double spectral = ph.smoothed(x, eta);
                for (double mu : {0.0, 0.5, 1.0}) {
                    CHECK(ph.smoothed_direct(x, eta, mu) == doctest::Approx(spectral).epsilon(1e-7).scale(1.0));
                }
            }
        }
    }
}

TEST_CASE("smoothed values converge to f at interior points") {
    const Phantom ph = Phantom::poly_bump(2.0, 1.0);
    const Point x{0.35, 0.2};
    CHECK(std::abs(ph.smoothed(x, 1e-3) - ph.eval(x)) < 1e-6);
    const auto levels = ph.smoothed_levels(x, std::vector<double>{0.5, 0.01, 0.1});
    CHECK(levels[0] == ph.smoothed(x, 0.5));
    CHECK(levels[1] == doctest::Approx(ph.smoothed(x, 0.01)).epsilon(1e-13));
    CHECK(levels[2] == doctest::Approx(ph.smoothed(x, 0.1)).epsilon(1e-13));
}

TEST_CASE("polynomial bump spectrum decays like k^-(p + 1/2)") {
    const double p = 2.0;
    const Phantom ph = Phantom::poly_bump(p, 1.0);
    auto envelope = [&](double lo, double hi) {
        double m = 0.0;
        for (double k = lo; k < hi; k += 0.01) m = std::max(m, std::abs(ph.radial_spectrum(k)) * std::pow(k, p + 0.5));
        return m;
    };
    // The 2-D transform is 2 pi phi(k) / k ~ k^-(p + 3/2): Sobolev index p + 1/2.
    const double low = envelope(100.0, 110.0);
    const double high = envelope(800.0, 810.0);
    CHECK(high / low == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("lower-bound bump peak and sup bound") {
    const double amp = 0.4, beta1 = 1.5, h = 0.2;
    const Point x0{0.3, -0.25};
    const Phantom ph = Phantom::lepski_bump(amp, beta1, h, x0);
    CHECK(ph.eval(x0) == amp * std::pow(h, beta1 - 1.0));
    CHECK(ph.certified_sup() == ph.eval(x0));
    CHECK(ph.big_l() >= ph.certified_sup());
    for (double r : {0.01, 0.05, 0.1, 0.15, 0.199}) CHECK(ph.eval({x0.x + r, x0.y}) < ph.eval(x0));
    CHECK(ph.eval({x0.x + h, x0.y}) == 0.0);
    CHECK_THROWS_AS(Phantom(LepskiBump{amp, beta1, h, x0}, 0.01), std::domain_error);
    const Phantom for_n = Phantom::lepski_bump_for_n(amp, beta1, 4096, x0);
    const double h_n = std::pow(std::log(4096.0) / 4096.0, 1.0 / 4.0);
    CHECK(std::get<LepskiBump>(for_n.kind()).h == doctest::Approx(h_n).epsilon(1e-15));
    CHECK(for_n.eval(x0) == amp * std::pow(std::get<LepskiBump>(for_n.kind()).h, beta1 - 1.0));
}

TEST_CASE("phantom parameter validation") {
    CHECK_THROWS_AS(Phantom::disk(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(Phantom::disk(1.2, 1.0), std::domain_error);
    CHECK_THROWS_AS(Phantom::poly_bump(-1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(Phantom::lepski_bump(1.5, 1.5, 0.2, {}), std::domain_error);
    CHECK_THROWS_AS(Phantom::lepski_bump(0.5, 1.5, 0.2, {0.9, 0.0}), std::domain_error);
}

TEST_CASE("phantom JSON round trip and rejection of unknown keys") {
    const Phantom phantoms[] = {Phantom::disk(0.5, 2.0), Phantom::poly_bump(2.0, 1.0),
                                Phantom::lepski_bump(0.5, 1.5, 0.25, {0.1, -0.2}),
                                Phantom(PolyBump{2.0, 1.0}, 3.0)};
    for (const auto& ph : phantoms) {
        const Phantom back = Phantom::from_json(ph.to_json());
        CHECK(back.id() == ph.id());
        CHECK(back.big_l() == ph.big_l());
    }
    using nlohmann::json;
    CHECK_THROWS_WITH_AS(Phantom::from_json(json{{"kind", "poly_bump"}, {"params", {{"p", 2}, {"q", 1}}}}),
                         "phantom.params.q: unknown key", std::domain_error);
    CHECK_THROWS_WITH_AS(Phantom::from_json(json{{"kind", "square"}, {"params", json::object()}}),
                         "phantom.kind: unknown kind 'square'", std::domain_error);
    CHECK_THROWS_AS(Phantom::from_json(json{{"kind", "disk_indicator"}, {"extra", 1}}), std::domain_error);
    const Phantom from_n = Phantom::from_json(json{{"kind", "lepski_bump"}, {"params", {{"A", 0.5}, {"beta1", 1.5}, {"n", 4096}}}});
    CHECK(std::get<LepskiBump>(from_n.kind()).h == doctest::Approx(std::pow(std::log(4096.0) / 4096.0, 0.25)));
}

TEST_CASE("effective smoothness") {
    CHECK(Phantom::disk(0.5, 1.0).effective_smoothness() == 0.5);
    CHECK_FALSE(Phantom::disk(0.5, 1.0).is_rate_regime());
    CHECK(Phantom::poly_bump(2.0, 1.0).effective_smoothness() == doctest::Approx(2.95));
    CHECK(Phantom::lepski_bump(0.5, 1.5, 0.2, {}).effective_smoothness() == 1.5);
}

TEST_CASE("dual transform of a constant") {
    for (double mu : {0.0, 0.5, 1.3}) {
        const Point x{0.3, -0.4};
        const double expected = 2.0 * pi * boost::math::cyl_bessel_i(0, mu * x.norm());
        CHECK(dual_transform([](double, double) { return 1.0; }, x, mu) == doctest::Approx(expected).epsilon(1e-13));
    }
}
