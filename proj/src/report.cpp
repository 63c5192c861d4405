#include "ertadapt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ertadapt/errors.hpp"

namespace ertadapt {

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void row(std::string& out, std::size_t n, Point x, const std::string& delta, const std::string& stat,
         double value, double se) {
    out += std::to_string(n) + ',' + num(x.x) + ',' + num(x.y) + ',' + delta + ',' + stat + ',' + num(value) +
           ',' + num(se) + '\n';
}

const char* kColumns = "n,x,y,delta,statistic,value,se\n";

json slope_json(const SlopeCI& s) { return {{"slope", s.slope}, {"lo", s.lo}, {"hi", s.hi}, {"sd", s.sd}}; }

}  // namespace

json OutputHeader::to_json() const { return {{"format", format}, {"config_hash", config_hash}, {"seed", seed}}; }

std::string header_lines(const OutputHeader& h) {
    return "#format=" + h.format + "\n#config_hash=" + h.config_hash + "\n#seed=" + std::to_string(h.seed) + "\n";
}

OutputHeader read_header(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << file.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw std::domain_error(path.string() + ": invalid JSON: " + e.what());
        }
        if (!doc.contains("header")) throw std::domain_error(path.string() + ": no header object");
        const auto& h = doc["header"];
        return {h.value("format", ""), h.value("config_hash", ""), h.value("seed", std::uint64_t{0})};
    }
    OutputHeader h;
    std::istringstream in(text);
    std::string line;
    bool any = false;
    while (std::getline(in, line)) {
        if (line == "P2") continue;
        if (line.empty() || line[0] != '#') break;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        const auto value = line.substr(eq + 1);
        if (key == "format") h.format = value, any = true;
        if (key == "config_hash") h.config_hash = value;
        if (key == "seed") h.seed = std::stoull(value);
    }
    if (!any) throw std::domain_error(path.string() + ": no format header");
    return h;
}

json to_json(const EstimatorConfig& cfg) {
    return {{"c_star", cfg.c_star}, {"c_dstar", cfg.c_dstar}, {"d2", cfg.d2},
            {"big_l", cfg.big_l},   {"a", cfg.a},             {"sigma", cfg.sigma}};
}

json to_json(const Calibration& cal) {
    json rows = json::array();
    for (const auto& r : cal.table)
        rows.push_back({{"delta", r.delta},
                        {"variance", r.variance},
                        {"variance_se", r.variance_se},
                        {"implied_c_star", r.implied_c_star},
                        {"v2", r.v2}});
    return {{"n", cal.n}, {"replicates", cal.replicates}, {"constants", to_json(cal.cfg)}, {"table", rows}};
}

json to_json(const std::vector<Assertion>& checks) {
    json out = json::array();
    for (const auto& a : checks)
        out.push_back({{"name", a.name}, {"value", a.value}, {"lo", a.lo}, {"hi", a.hi}, {"pass", a.pass}});
    return out;
}

json to_json(const VarianceReport& report) {
    json cells = json::array();
    for (const auto& c : report.cells)
        cells.push_back({{"n", c.n},
                         {"x", {c.x.x, c.x.y}},
                         {"delta", c.delta},
                         {"variance", c.variance},
                         {"variance_se", c.variance_se}});
    json slopes = json::array();
    for (const auto& s : report.slopes)
        slopes.push_back({{"against", s.against}, {"x", {s.x.x, s.x.y}}, {"fixed", s.fixed}, {"fit", slope_json(s.slope)}});
    return {{"cells", cells}, {"slopes", slopes}, {"checks", to_json(report.checks)}};
}

json to_json(const RateReport& report) {
    json cells = json::array();
    for (const auto& c : report.cells)
        cells.push_back({{"n", c.n},
                         {"x", {c.x.x, c.x.y}},
                         {"mse", c.mse},
                         {"mse_se", c.mse_se},
                         {"mean_delta_bar", c.mean_delta_bar},
                         {"oracle_delta", c.oracle_delta},
                         {"oracle_mse", c.oracle_mse},
                         {"oracle_mse_se", c.oracle_mse_se},
                         {"rate", c.rate},
                         {"rate_argmin", c.rate_argmin},
                         {"frac_below", c.frac_below}});
    json slopes = json::array();
    for (const auto& s : report.slopes)
        slopes.push_back({{"x", {s.x.x, s.x.y}},
                          {"raw", slope_json(s.raw)},
                          {"corrected", slope_json(s.corrected)},
                          {"oracle_ratio", slope_json(s.oracle_ratio)},
                          {"adaptive_ratio", slope_json(s.adaptive_ratio)}});
    return {{"beta_eff", report.beta_eff},
            {"exponent", report.exponent},
            {"zero_signal", report.zero_signal},
            {"cells", cells},
            {"slopes", slopes},
            {"checks", to_json(report.checks)}};
}

std::string calibration_csv(const Calibration& cal, const OutputHeader& h) {
    std::string out = header_lines(h) + kColumns;
    for (const auto& r : cal.table) {
        row(out, cal.n, Point{}, num(r.delta), "variance", r.variance, r.variance_se);
        row(out, cal.n, Point{}, num(r.delta), "v2", r.v2, 0.0);
    }
    return out;
}

std::string variance_csv(const VarianceReport& report, const OutputHeader& h) {
    std::string out = header_lines(h) + kColumns;
    for (const auto& c : report.cells) row(out, c.n, c.x, num(c.delta), "variance", c.variance, c.variance_se);
    return out;
}

std::string rate_csv(const RateReport& report, const OutputHeader& h) {
    std::string out = header_lines(h) + kColumns;
    for (const auto& c : report.cells) {
        row(out, c.n, c.x, "", "mse", c.mse, c.mse_se);
        row(out, c.n, c.x, "", "oracle_mse", c.oracle_mse, c.oracle_mse_se);
        row(out, c.n, c.x, "", "rate", c.rate, 0.0);
        row(out, c.n, c.x, num(c.oracle_delta), "oracle_delta", c.oracle_delta, 0.0);
        row(out, c.n, c.x, "", "mean_delta_bar", c.mean_delta_bar, 0.0);
        row(out, c.n, c.x, "", "frac_below", c.frac_below, 0.0);
    }
    return out;
}

std::string image_pgm(const Image& img, const OutputHeader& h) {
    const auto [lo_it, hi_it] = std::minmax_element(img.value.begin(), img.value.end());
    const double lo = *lo_it, hi = *hi_it;
    std::string out = "P2\n# format=" + h.format + "\n# config_hash=" + h.config_hash +
                      "\n# seed=" + std::to_string(h.seed) + "\n# range=" + num(lo) + "," + num(hi) + "\n";
    out += std::to_string(img.spec.width) + ' ' + std::to_string(img.spec.height) + "\n255\n";
    for (std::size_t r = 0; r < img.spec.height; ++r) {
        for (std::size_t c = 0; c < img.spec.width; ++c) {
            const double v = img.value[r * img.spec.width + c];
            const int level = hi > lo ? static_cast<int>(std::lround(255.0 * (v - lo) / (hi - lo))) : 0;
            if (c) out += ' ';
            out += std::to_string(level);
        }
        out += '\n';
    }
    return out;
}

std::string image_csv(const Image& img, const OutputHeader& h) {
    std::string out = header_lines(h) + "row,col,x,y,delta_bar,value\n";
    for (std::size_t r = 0; r < img.spec.height; ++r) {
        for (std::size_t c = 0; c < img.spec.width; ++c) {
            const std::size_t i = r * img.spec.width + c;
            const Point x = img.pixel_center(r, c);
            out += std::to_string(r) + ',' + std::to_string(c) + ',' + num(x.x) + ',' + num(x.y) + ',' +
                   num(img.delta_bar[i]) + ',' + num(img.value[i]) + '\n';
        }
    }
    return out;
}

std::string plot_script(const std::string& csv_name, const std::string& statistic) {
    std::string s;
    s += "# gnuplot script\n";
    s += "set datafile separator ','\n";
    s += "set logscale xy\n";
    s += "set xlabel 'n'\n";
    s += "set ylabel '" + statistic + "'\n";
    s += "set key top right\n";
    s += "set terminal pngcairo size 800,600\n";
    s += "set output '" + csv_name + ".png'\n";
    s += "plot '" + csv_name + "' using (strcol(5) eq '" + statistic + "' ? $1 : 1/0):6:7 with yerrorlines title '" +
         statistic + "'\n";
    return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    file << text;
    if (!file) throw IoError("write failed for " + path.string());
}

}  // namespace ertadapt
