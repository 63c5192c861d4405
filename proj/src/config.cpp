#include "ertadapt/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>

#include "ertadapt/errors.hpp"

namespace ertadapt {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigError((path.empty() ? key : path + "." + key) + ": unknown key");
    }
}

double number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(path + "." + key + ": expected a number");
    const double v = obj[key].get<double>();
    if (!std::isfinite(v)) throw ConfigError(path + "." + key + ": must be finite");
    return v;
}

bool non_negative_integer(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::size_t count(const json& obj, const std::string& path, const char* key, std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    if (!non_negative_integer(obj[key])) throw ConfigError(path + "." + key + ": expected a non-negative integer");
    return obj[key].get<std::size_t>();
}

Point parse_point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(path + ": expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

std::string config_hash(const json& doc) {
    const std::string text = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunConfig::hash() const { return config_hash(doc); }

RunConfig RunConfig::from_json(const json& in) {
    reject_unknown(in, "", {"phantom", "noise", "grid", "constants", "campaign", "output_dir", "seed"});
    RunConfig rc;
    json doc;

    if (!in.contains("phantom")) throw ConfigError("phantom: missing");
    doc["phantom"] = in["phantom"];

    const json noise = in.value("noise", json::object());
    reject_unknown(noise, "noise", {"mu", "sigma"});
    const double mu = number(noise, "noise", "mu", 0.0);
    const double sigma = number(noise, "noise", "sigma", 0.0);
    if (!(sigma >= 0.0)) throw ConfigError("noise.sigma must be ≥ 0");
    doc["noise"] = {{"mu", mu}, {"sigma", sigma}};

    const json grid = in.value("grid", json::object());
    reject_unknown(grid, "grid", {"a"});
    const double a = number(grid, "grid", "a", 2.0);
    if (!(a >= 2.0)) throw ConfigError("grid.a must be ≥ 2");
    doc["grid"] = {{"a", a}};

    if (in.contains("seed")) {
        if (!non_negative_integer(in["seed"])) throw ConfigError("seed: expected a non-negative integer");
        rc.seed = in["seed"].get<std::uint64_t>();
    }
    doc["seed"] = rc.seed;

    if (in.contains("output_dir")) {
        if (!in["output_dir"].is_string()) throw ConfigError("output_dir: expected a string");
        rc.output_dir = in["output_dir"].get<std::string>();
    }
    doc["output_dir"] = rc.output_dir;

    const json campaign = in.value("campaign", json::object());
    reject_unknown(campaign, "campaign",
                   {"mode", "points", "n_values", "replicates", "deltas", "bootstrap", "calibration", "image"});
    Campaign& c = rc.campaign;
    c.phantom = doc["phantom"];
    c.mu = mu;
    c.sigma = sigma;
    c.a = a;
    c.seed = rc.seed;
    if (campaign.contains("mode")) {
        if (!campaign["mode"].is_string()) throw ConfigError("campaign.mode: expected a string");
        try {
            c.mode = parse_mode(campaign["mode"].get<std::string>());
        } catch (const std::domain_error& e) {
            throw ConfigError(e.what());
        }
    }
    if (campaign.contains("points")) {
        const auto& pts = campaign["points"];
        if (!pts.is_array() || pts.empty()) throw ConfigError("campaign.points: expected a non-empty array");
        c.points.clear();
        for (std::size_t i = 0; i < pts.size(); ++i)
            c.points.push_back(parse_point(pts[i], "campaign.points[" + std::to_string(i) + "]"));
    }
    if (campaign.contains("n_values")) {
        const auto& ns = campaign["n_values"];
        if (!ns.is_array()) throw ConfigError("campaign.n_values: expected an array");
        for (std::size_t i = 0; i < ns.size(); ++i) {
            if (!non_negative_integer(ns[i]) || ns[i].get<std::int64_t>() == 0)
                throw ConfigError("campaign.n_values[" + std::to_string(i) + "]: expected a positive integer");
            c.n_values.push_back(ns[i].get<std::size_t>());
        }
    } else {
        c.n_values = {4096, 8192, 16384, 32768, 65536};
    }
    c.replicates = count(campaign, "campaign", "replicates", 200);
    c.bootstrap = count(campaign, "campaign", "bootstrap", 1000);
    if (campaign.contains("deltas")) {
        const auto& ds = campaign["deltas"];
        if (!ds.is_array() || ds.empty()) throw ConfigError("campaign.deltas: expected a non-empty array");
        c.deltas.clear();
        for (const auto& d : ds) {
            if (!d.is_number()) throw ConfigError("campaign.deltas: expected numbers");
            c.deltas.push_back(d.get<double>());
        }
    }
    const json calib = campaign.value("calibration", json::object());
    reject_unknown(calib, "campaign.calibration", {"n", "replicates", "point"});
    rc.calibration.n = count(calib, "campaign.calibration", "n", 4096);
    rc.calibration.replicates = count(calib, "campaign.calibration", "replicates", 200);
    if (calib.contains("point")) rc.calibration.point = parse_point(calib["point"], "campaign.calibration.point");
    if (rc.calibration.replicates < 100) throw ConfigError("campaign.calibration.replicates must be ≥ 100");

    const json image = campaign.value("image", json::object());
    reject_unknown(image, "campaign.image", {"width", "height", "extent"});
    rc.image.width = count(image, "campaign.image", "width", 64);
    rc.image.height = count(image, "campaign.image", "height", rc.image.width);
    rc.image.extent = number(image, "campaign.image", "extent", 1.0);
    if (rc.image.width == 0 || rc.image.height == 0) throw ConfigError("campaign.image: size must be positive");
    if (!(rc.image.extent > 0.0 && rc.image.extent <= 1.0))
        throw ConfigError("campaign.image.extent must lie in (0, 1]");

    json points = json::array();
    for (const auto& p : c.points) points.push_back({p.x, p.y});
    doc["campaign"] = {{"mode", mode_name(c.mode)},
                       {"points", points},
                       {"n_values", c.n_values},
                       {"replicates", c.replicates},
                       {"deltas", c.deltas},
                       {"bootstrap", c.bootstrap},
                       {"calibration",
                        {{"n", rc.calibration.n},
                         {"replicates", rc.calibration.replicates},
                         {"point", {rc.calibration.point.x, rc.calibration.point.y}}}},
                       {"image",
                        {{"width", rc.image.width}, {"height", rc.image.height}, {"extent", rc.image.extent}}}};

    try {
        c.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    const Phantom ph = c.phantom_for(c.n_values.empty() ? rc.calibration.n : c.n_values.front());

    const json constants = in.value("constants", json("calibrate"));
    if (constants.is_string()) {
        if (constants.get<std::string>() != "calibrate")
            throw ConfigError("constants: expected an object or \"calibrate\"");
        doc["constants"] = "calibrate";
        try {
            make_grid(rc.calibration.n, a);
        } catch (const std::domain_error& e) {
            throw ConfigError(std::string("campaign.calibration.n: ") + e.what());
        }
    } else {
        reject_unknown(constants, "constants", {"c_star", "c_dstar", "d2", "big_l"});
        EstimatorConfig cfg;
        cfg.c_star = number(constants, "constants", "c_star", 1.0);
        cfg.c_dstar = number(constants, "constants", "c_dstar", cfg.c_star);
        cfg.big_l = number(constants, "constants", "big_l", ph.big_l());
        cfg.d2 = number(constants, "constants", "d2", cfg.c_star > 0.0 ? default_d2(cfg.c_star, cfg.big_l) : 1.0);
        cfg.a = a;
        cfg.sigma = sigma;
        if (!(cfg.c_star > 0.0)) throw ConfigError("constants.c_star must be > 0");
        if (!(cfg.c_dstar > 0.0)) throw ConfigError("constants.c_dstar must be > 0");
        if (!(cfg.d2 > 0.0)) throw ConfigError("constants.d2 must be > 0");
        if (!(cfg.big_l >= 0.0)) throw ConfigError("constants.big_l must be ≥ 0");
        rc.constants = cfg;
        doc["constants"] = {{"c_star", cfg.c_star}, {"c_dstar", cfg.c_dstar}, {"d2", cfg.d2}, {"big_l", cfg.big_l}};
    }
    rc.doc = std::move(doc);
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(file);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
    return RunConfig::from_json(doc);
}

}  // namespace ertadapt
