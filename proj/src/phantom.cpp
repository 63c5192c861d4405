#include "ertadapt/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "ertadapt/kernel.hpp"
#include "ertadapt/quadrature.hpp"

namespace ertadapt {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

double bump_profile(double u2) {
    if (u2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u2));
}

// Adaptive Gauss-Legendre on [a, b]: accept the 64-node value when it agrees
// with the 32-node value, otherwise bisect.
template <class F>
double adaptive_gl(const F& f, double a, double b, double tol, int depth) {
    const double fine = gauss_legendre_64().integrate(f, a, b);
    const double coarse = gauss_legendre_32().integrate(f, a, b);
    if (std::abs(fine - coarse) <= tol * std::max(1.0, std::abs(fine)) || depth == 0) return fine;
    const double mid = 0.5 * (a + b);
    return adaptive_gl(f, a, mid, tol, depth - 1) + adaptive_gl(f, mid, b, tol, depth - 1);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::domain_error(message);
}

// int_{-w}^{w} (w^2 - t^2)^p e^{mu t} dt
//   = w^{2p+1} sqrt(pi) Gamma(p+1) sum_k (mu w / 2)^{2k} / (k! Gamma(p + 3/2 + k)).
double poly_chord_integral(double p, double w, double mu) {
    const double z2 = 0.25 * (mu * w) * (mu * w);
    double term = 1.0 / std::tgamma(p + 1.5);
    double sum = term;
    for (int k = 1; k < 1000; ++k) {
        term *= z2 / (k * (p + 0.5 + k));
        sum += term;
        if (term <= 1e-17 * sum) break;
    }
    return std::pow(w, 2.0 * p + 1.0) * std::sqrt(kPi) * std::tgamma(p + 1.0) * sum;
}

}  // namespace

double Point::norm() const { return std::hypot(x, y); }

Point LineCoords::direction() const { return {std::cos(theta), std::sin(theta)}; }

Point LineCoords::perpendicular() const { return {-std::sin(theta), std::cos(theta)}; }

Phantom::Phantom(Kind kind, std::optional<double> big_l) : kind_(std::move(kind)) {
    std::visit(overloaded{
                   [&](const DiskIndicator& d) {
                       require(d.r0 > 0.0 && d.r0 <= 1.0, "disk radius r0 must lie in (0, 1]");
                       require(std::isfinite(d.amplitude), "amplitude must be finite");
                       support_radius_ = d.r0;
                   },
                   [&](const PolyBump& b) {
                       require(b.p > 0.0 && std::isfinite(b.p), "poly bump exponent p must be > 0");
                       require(std::isfinite(b.amplitude), "amplitude must be finite");
                       support_radius_ = 1.0;
                   },
                   [&](const LepskiBump& b) {
                       require(b.amplitude > 0.0 && b.amplitude < 1.0, "A must lie in (0, 1)");
                       require(b.beta1 > 1.0, "beta1 must be > 1");
                       require(b.h > 0.0 && b.h <= 1.0, "h must lie in (0, 1]");
                       require(b.x0.norm() + b.h <= 1.0 + 1e-12,
                               "bump support |x0| + h must stay inside the unit disk");
                       support_radius_ = b.h;
                   },
               },
               kind_);
    const double sup = certified_sup();
    if (big_l) {
        require(*big_l >= sup, "big_l is below the certified sup |f| = " + std::to_string(sup));
        big_l_ = *big_l;
    } else {
        big_l_ = sup;
    }
}

Phantom Phantom::disk(double r0, double amplitude) { return Phantom(DiskIndicator{r0, amplitude}); }

Phantom Phantom::poly_bump(double p, double amplitude) { return Phantom(PolyBump{p, amplitude}); }

Phantom Phantom::lepski_bump(double amplitude, double beta1, double h, Point x0) {
    return Phantom(LepskiBump{amplitude, beta1, h, x0});
}

Phantom Phantom::lepski_bump_for_n(double amplitude, double beta1, std::size_t n, Point x0) {
    require(n >= 2, "lepski bump needs n >= 2");
    const double nn = static_cast<double>(n);
    const double h = std::pow(std::log(nn) / nn, 1.0 / (2.0 * beta1 + 1.0));
    return lepski_bump(amplitude, beta1, h, x0);
}

double Phantom::certified_sup() const {
    return std::visit(overloaded{
                          [](const DiskIndicator& d) { return std::abs(d.amplitude); },
                          [](const PolyBump& b) { return std::abs(b.amplitude); },
                          [](const LepskiBump& b) {
                              return b.amplitude * std::pow(b.h, b.beta1 - 1.0);
                          },
                      },
                      kind_);
}

Point Phantom::center() const {
    if (const auto* b = std::get_if<LepskiBump>(&kind_)) return b->x0;
    return {};
}

double Phantom::eval(Point x) const {
    return std::visit(overloaded{
                          [&](const DiskIndicator& d) {
                              return x.norm() <= d.r0 ? d.amplitude : 0.0;
                          },
                          [&](const PolyBump& b) {
                              const double r2 = dot(x, x);
                              return r2 < 1.0 ? b.amplitude * std::pow(1.0 - r2, b.p) : 0.0;
                          },
                          [&](const LepskiBump& b) {
                              const Point u{(x.x - b.x0.x) / b.h, (x.y - b.x0.y) / b.h};
                              return b.amplitude * std::pow(b.h, b.beta1 - 1.0) *
                                     bump_profile(dot(u, u));
                          },
                      },
                      kind_);
}

double Phantom::ert(LineCoords line, double mu) const {
    if (const auto* d = std::get_if<DiskIndicator>(&kind_)) {
        const double s = line.s;
        if (std::abs(s) >= d->r0) return 0.0;
        const double half_chord = std::sqrt(d->r0 * d->r0 - s * s);
        if (mu == 0.0) return 2.0 * d->amplitude * half_chord;
        return d->amplitude * 2.0 * std::sinh(mu * half_chord) / mu;
    }
    if (const auto* b = std::get_if<PolyBump>(&kind_)) {
        const double w2 = 1.0 - line.s * line.s;
        if (w2 <= 0.0) return 0.0;
        return b->amplitude * poly_chord_integral(b->p, std::sqrt(w2), mu);
    }
    return ert_quadrature(line, mu);
}

double Phantom::ert_quadrature(LineCoords line, double mu) const {
    const Point dir = line.direction();
    const Point perp = line.perpendicular();
    const Point c = center();
    const double offset = dot(c, dir) - line.s;
    const double rho = support_radius_;
    if (std::abs(offset) >= rho) return 0.0;
    const double half = std::sqrt(rho * rho - offset * offset);
    const double t0 = dot(c, perp);
    // t = t0 + half * sin(phi) removes the square-root behaviour at the chord ends.
    auto integrand = [&](double phi) {
        const double t = t0 + half * std::sin(phi);
        const Point x{line.s * dir.x + t * perp.x, line.s * dir.y + t * perp.y};
        return std::exp(mu * t) * eval(x) * half * std::cos(phi);
    };
    return adaptive_gl(integrand, -0.5 * kPi, 0.5 * kPi, 1e-13, 12);
}

double Phantom::radial_spectrum(double k) const {
    return std::visit(overloaded{
                          [&](const DiskIndicator& d) {
                              return d.amplitude * d.r0 * std::cyl_bessel_j(1.0, k * d.r0);
                          },
                          [&](const PolyBump& b) {
                              if (k == 0.0) return 0.0;
                              return b.amplitude * std::pow(2.0, b.p) * std::tgamma(b.p + 1.0) *
                                     std::cyl_bessel_j(b.p + 1.0, k) * std::pow(k, -b.p);
                          },
                          [&](const LepskiBump&) -> double {
                              throw std::logic_error("lepski bump has no closed-form spectrum");
                          },
                      },
                      kind_);
}

double Phantom::smoothed(Point x, double eta) const {
    const double etas[] = {eta};
    return smoothed_levels(x, etas).front();
}

std::vector<double> Phantom::smoothed_levels(Point x, std::span<const double> etas) const {
    for (double eta : etas) require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
    const Point c = center();
    const double dist = std::hypot(x.x - c.x, x.y - c.y);
    std::vector<double> out(etas.size());
    if (std::holds_alternative<LepskiBump>(kind_)) {
        for (std::size_t i = 0; i < etas.size(); ++i) out[i] = smoothed_real_space(dist, 1.0 / etas[i]);
        return out;
    }
    std::vector<std::size_t> order(etas.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return etas[i] > etas[j]; });
    std::vector<double> cutoffs;
    cutoffs.reserve(etas.size());
    for (auto i : order) cutoffs.push_back(1.0 / etas[i]);
    std::vector<double> sorted_out(etas.size());
    smoothed_spectral(dist, cutoffs, sorted_out);
    for (std::size_t j = 0; j < order.size(); ++j) out[order[j]] = sorted_out[j];
    return out;
}

// Cumulative int_0^{cutoff} phi(k) J0(k dist) dk over ascending cutoffs,
// 16-node panels no wider than a sixth of the fastest oscillation period.
double Phantom::smoothed_spectral(double dist, std::span<const double> cutoffs_sorted,
                                  std::span<double> out) const {
    const auto& rule = gauss_legendre_16();
    const double freq = (std::holds_alternative<DiskIndicator>(kind_)
                             ? std::get<DiskIndicator>(kind_).r0
                             : 1.0) +
                        dist;
    const double width = 1.0 / (freq + 0.5);
    auto integrand = [&](double k) {
        const double j0 = dist == 0.0 ? 1.0 : std::cyl_bessel_j(0.0, k * dist);
        return radial_spectrum(k) * j0;
    };
    double acc = 0.0;
    double k = 0.0;
    for (std::size_t i = 0; i < cutoffs_sorted.size(); ++i) {
        const double target = cutoffs_sorted[i];
        while (k < target) {
            const double next = std::min(target, k + width);
            acc += rule.integrate(integrand, k, next);
            k = next;
        }
        out[i] = acc;
    }
    return acc;
}

// f_eta(x) = (Omega / 2pi) int_0^inf J1(Omega r) A(r) dr with A(r) the integral
// of f over the circle of radius r about x (for the bump, radial about x0).
double Phantom::smoothed_real_space(double dist, double cutoff) const {
    const auto& bump = std::get<LepskiBump>(kind_);
    const double h = bump.h;
    const double peak = bump.amplitude * std::pow(h, bump.beta1 - 1.0);
    const auto& arc_rule = gauss_legendre_64();
    auto circle_integral = [&](double r) {
        // |y - x0|^2 = r^2 + dist^2 - 2 r dist cos(alpha) on the circle |y - x| = r.
        if (dist == 0.0 || r + dist <= h) {
            if (dist == 0.0) return 2.0 * kPi * peak * bump_profile((r * r) / (h * h));
            auto g = [&](double alpha) {
                const double q2 = r * r + dist * dist - 2.0 * r * dist * std::cos(alpha);
                return peak * bump_profile(q2 / (h * h));
            };
            return 2.0 * arc_rule.integrate(g, 0.0, kPi, 2);
        }
        const double cos_gamma = (r * r + dist * dist - h * h) / (2.0 * r * dist);
        if (cos_gamma >= 1.0) return 0.0;
        const double gamma = cos_gamma <= -1.0 ? kPi : std::acos(cos_gamma);
        auto g = [&](double alpha) {
            const double q2 = r * r + dist * dist - 2.0 * r * dist * std::cos(alpha);
            return peak * bump_profile(q2 / (h * h));
        };
        return 2.0 * arc_rule.integrate(g, 0.0, gamma);
    };
    const double r_lo = std::max(0.0, dist - h);
    const double r_hi = dist + h;
    const double width = std::min(h / 8.0, kPi / cutoff);
    const auto panels = static_cast<std::size_t>(std::ceil((r_hi - r_lo) / width));
    auto integrand = [&](double r) { return std::cyl_bessel_j(1.0, cutoff * r) * circle_integral(r); };
    return cutoff / (2.0 * kPi) * gauss_legendre_16().integrate(integrand, r_lo, r_hi, panels);
}

double Phantom::smoothed_direct(Point x, double eta, double mu, int refine) const {
    require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
    require(refine >= 1, "refine must be >= 1");
    const Kernel kernel(KernelParams{mu, eta});
    const double cutoff = kernel.params().cutoff();
    const Point c = center();
    const double rho = support_radius_;
    const double reach = x.norm() + c.norm();
    const auto n_theta = static_cast<std::size_t>(
        refine * (2 * static_cast<int>(std::ceil(cutoff * reach)) +
                  4 * static_cast<int>(std::ceil(std::abs(mu) * 2.0)) + 64));
    const auto panels = static_cast<std::size_t>(refine * (std::ceil(cutoff * rho) + 4));
    const auto& rule = gauss_legendre_16();
    double total = 0.0;
    for (std::size_t i = 0; i < n_theta; ++i) {
        const LineCoords probe{2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_theta), 0.0};
        const Point dir = probe.direction();
        const Point perp = probe.perpendicular();
        const double xs = dot(x, dir);
        const double sc = dot(c, dir);
        auto inner = [&](double psi) {
            const double s = sc + rho * std::sin(psi);
            return kernel(xs - s) * ert(LineCoords{probe.theta, s}, mu) * rho * std::cos(psi);
        };
        const double line_sum = rule.integrate(inner, -0.5 * kPi, 0.5 * kPi, panels);
        total += std::exp(-mu * dot(x, perp)) * line_sum;
    }
    const double dtheta = 2.0 * kPi / static_cast<double>(n_theta);
    return total * dtheta / (4.0 * kPi);
}

double Phantom::effective_smoothness() const {
    return std::visit(overloaded{
                          [](const DiskIndicator&) { return 0.5; },
                          [](const PolyBump& b) { return b.p + 1.0 - 0.05; },
                          [](const LepskiBump& b) { return b.beta1; },
                      },
                      kind_);
}

nlohmann::json Phantom::to_json() const {
    using nlohmann::json;
    json spec = std::visit(
        overloaded{
            [](const DiskIndicator& d) {
                return json{{"kind", "disk_indicator"},
                            {"params", {{"r0", d.r0}, {"amplitude", d.amplitude}}}};
            },
            [](const PolyBump& b) {
                return json{{"kind", "poly_bump"}, {"params", {{"p", b.p}, {"amplitude", b.amplitude}}}};
            },
            [](const LepskiBump& b) {
                return json{{"kind", "lepski_bump"},
                            {"params",
                             {{"A", b.amplitude},
                              {"beta1", b.beta1},
                              {"h", b.h},
                              {"x0", json::array({b.x0.x, b.x0.y})}}}};
            },
        },
        kind_);
    if (big_l_ != certified_sup()) spec["params"]["big_l"] = big_l_;
    return spec;
}

std::string Phantom::id() const { return to_json().dump(); }

Phantom Phantom::from_json(const nlohmann::json& spec) {
    if (!spec.is_object()) throw std::domain_error("phantom: expected an object");
    for (const auto& [key, _] : spec.items()) {
        if (key != "kind" && key != "params") throw std::domain_error("phantom." + key + ": unknown key");
    }
    if (!spec.contains("kind") || !spec["kind"].is_string())
        throw std::domain_error("phantom.kind: missing or not a string");
    const std::string kind = spec["kind"];
    const nlohmann::json params = spec.value("params", nlohmann::json::object());
    if (!params.is_object()) throw std::domain_error("phantom.params: expected an object");

    auto check_keys = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [key, _] : params.items()) {
            bool known = key == "big_l";
            for (const char* a : allowed) known = known || key == a;
            if (!known) throw std::domain_error("phantom.params." + key + ": unknown key");
        }
    };
    auto number = [&](const char* key, std::optional<double> fallback = std::nullopt) {
        if (!params.contains(key)) {
            if (fallback) return *fallback;
            throw std::domain_error(std::string("phantom.params.") + key + ": missing");
        }
        if (!params[key].is_number())
            throw std::domain_error(std::string("phantom.params.") + key + ": expected a number");
        return params[key].get<double>();
    };
    auto point = [&](const char* key) {
        if (!params.contains(key)) return Point{};
        const auto& v = params[key];
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw std::domain_error(std::string("phantom.params.") + key + ": expected [x, y]");
        return Point{v[0].get<double>(), v[1].get<double>()};
    };
    std::optional<double> big_l;
    if (params.contains("big_l")) big_l = number("big_l");

    if (kind == "disk_indicator") {
        check_keys({"r0", "amplitude"});
        return Phantom(DiskIndicator{number("r0"), number("amplitude", 1.0)}, big_l);
    }
    if (kind == "poly_bump") {
        check_keys({"p", "amplitude"});
        return Phantom(PolyBump{number("p"), number("amplitude", 1.0)}, big_l);
    }
    if (kind == "lepski_bump") {
        check_keys({"A", "beta1", "h", "n", "x0"});
        const double a = number("A");
        const double beta1 = number("beta1");
        double h = 0.0;
        if (params.contains("h")) {
            h = number("h");
        } else {
            const double n = number("n");
            if (n < 2) throw std::domain_error("phantom.params.n: must be >= 2");
            h = std::pow(std::log(n) / n, 1.0 / (2.0 * beta1 + 1.0));
        }
        return Phantom(LepskiBump{a, beta1, h, point("x0")}, big_l);
    }
    throw std::domain_error("phantom.kind: unknown kind '" + kind + "'");
}

double dual_transform(const std::function<double(double, double)>& g, Point x, double mu,
                      std::size_t nodes) {
    if (nodes == 0) throw std::invalid_argument("dual_transform needs at least one node");
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        const LineCoords dir{2.0 * kPi * static_cast<double>(i) / static_cast<double>(nodes), 0.0};
        sum += std::exp(mu * dot(x, dir.perpendicular())) * g(dir.theta, dot(x, dir.direction()));
    }
    return sum * 2.0 * kPi / static_cast<double>(nodes);
}

}  // namespace ertadapt
