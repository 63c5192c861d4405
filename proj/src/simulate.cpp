#include "ertadapt/simulate.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "ertadapt/errors.hpp"
#include "ertadapt/parallel.hpp"
#include "ertadapt/rng.hpp"

namespace ertadapt {

namespace {

enum Channel : std::uint32_t { kTheta = 0, kOffset = 1, kNoise = 2 };

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view field, std::size_t line, const char* what) {
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw SinogramParseError(std::string("malformed number in ") + what + ": '" +
                                     std::string(field) + "'",
                                 line);
    }
    return value;
}

std::uint64_t parse_u64(const std::string& field, std::size_t line, const char* what) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw SinogramParseError(std::string("malformed integer in ") + what + ": '" + field + "'",
                                 line);
    }
    return value;
}

}  // namespace

Sinogram sample_sinogram(const Phantom& ph, std::size_t n, double mu, double sigma,
                         std::uint64_t seed, std::size_t workers) {
    if (n == 0) throw std::domain_error("sample_sinogram: n must be >= 1");
    if (!(sigma >= 0.0)) throw std::domain_error("sample_sinogram: sigma must be >= 0");
    if (!std::isfinite(mu)) throw std::domain_error("sample_sinogram: mu must be finite");
    Sinogram sg;
    sg.mu = mu;
    sg.sigma = sigma;
    sg.seed = seed;
    sg.phantom_id = ph.id();
    sg.samples.resize(n);
    parallel_for(n, workers, [&](std::size_t i) {
        Observation& obs = sg.samples[i];
        obs.theta = 2.0 * std::numbers::pi * uniform_open(seed, i, kTheta);
        obs.s = -1.0 + 2.0 * uniform_open(seed, i, kOffset);
        const double noise = sigma == 0.0 ? 0.0 : sigma * standard_normal(seed, i, kNoise);
        obs.y = ph.ert(LineCoords{obs.theta, obs.s}, mu) + noise;
    });
    return sg;
}

std::string format_sinogram(const Sinogram& sg) {
    std::string out;
    out.reserve(64 * sg.samples.size() + 256);
    out += "#format=";
    out += kSinogramFormat;
    out += '\n';
    if (!sg.config_hash.empty()) out += "#config_hash=" + sg.config_hash + '\n';
    out += "#phantom_id=" + sg.phantom_id + '\n';
    out += "#n=" + std::to_string(sg.samples.size()) + '\n';
    out += "#mu=" + format_double(sg.mu) + '\n';
    out += "#sigma=" + format_double(sg.sigma) + '\n';
    out += "#seed=" + std::to_string(sg.seed) + '\n';
    out += "theta,s,y\n";
    for (const auto& obs : sg.samples) {
        out += format_double(obs.theta);
        out += ',';
        out += format_double(obs.s);
        out += ',';
        out += format_double(obs.y);
        out += '\n';
    }
    return out;
}

void save_sinogram(const Sinogram& sg, const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    file << format_sinogram(sg);
    if (!file) throw IoError("write failed for " + path.string());
}

Sinogram parse_sinogram(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw SinogramParseError("missing section: format header", 1);
    ++line_no;
    const std::string format_prefix = "#format=";
    if (line.rfind(format_prefix, 0) != 0)
        throw SinogramParseError("missing section: format header", line_no);
    if (line.substr(format_prefix.size()) != kSinogramFormat) {
        throw SinogramParseError("format version mismatch: expected " + std::string(kSinogramFormat) +
                                     ", found " + line.substr(format_prefix.size()),
                                 line_no);
    }

    std::map<std::string, std::pair<std::string, std::size_t>> header;
    bool have_columns = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind('#', 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw SinogramParseError("header line without '='", line_no);
            header[line.substr(1, eq - 1)] = {line.substr(eq + 1), line_no};
            continue;
        }
        if (line != "theta,s,y")
            throw SinogramParseError("missing section: column header 'theta,s,y'", line_no);
        have_columns = true;
        break;
    }
    for (const char* key : {"phantom_id", "n", "mu", "sigma", "seed"}) {
        if (!header.count(key))
            throw SinogramParseError(std::string("missing section: header key '") + key + "'",
                                     line_no);
    }
    if (!have_columns) throw SinogramParseError("missing section: column header 'theta,s,y'", line_no + 1);

    Sinogram sg;
    sg.phantom_id = header["phantom_id"].first;
    if (header.count("config_hash")) sg.config_hash = header["config_hash"].first;
    sg.mu = parse_double(header["mu"].first, header["mu"].second, "header mu");
    sg.sigma = parse_double(header["sigma"].first, header["sigma"].second, "header sigma");
    sg.seed = parse_u64(header["seed"].first, header["seed"].second, "header seed");
    const std::uint64_t n = parse_u64(header["n"].first, header["n"].second, "header n");
    if (n == 0) throw SinogramParseError("n must be >= 1", header["n"].second);
    if (!(sg.sigma >= 0.0)) throw SinogramParseError("sigma must be >= 0", header["sigma"].second);

    sg.samples.reserve(n);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
            throw SinogramParseError("expected 3 comma-separated fields", line_no);
        const std::string_view view(line);
        Observation obs;
        obs.theta = parse_double(view.substr(0, c1), line_no, "column theta");
        obs.s = parse_double(view.substr(c1 + 1, c2 - c1 - 1), line_no, "column s");
        obs.y = parse_double(view.substr(c2 + 1), line_no, "column y");
        if (!(obs.s >= -1.0 && obs.s <= 1.0)) throw SinogramParseError("s out of [-1,1]", line_no);
        if (!(obs.theta >= 0.0 && obs.theta < 2.0 * std::numbers::pi))
            throw SinogramParseError("theta out of [0,2pi)", line_no);
        if (!std::isfinite(obs.y)) throw SinogramParseError("y must be finite", line_no);
        if (sg.samples.size() == n) throw SinogramParseError("more rows than header n", line_no);
        sg.samples.push_back(obs);
    }
    if (sg.samples.size() != n) {
        throw SinogramParseError("missing section: body (expected " + std::to_string(n) +
                                     " rows, found " + std::to_string(sg.samples.size()) + ")",
                                 line_no + 1);
    }
    return sg;
}

Sinogram load_sinogram(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << file.rdbuf();
    return parse_sinogram(buf.str());
}

}  // namespace ertadapt
