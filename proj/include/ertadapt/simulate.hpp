#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ertadapt/phantom.hpp"

namespace ertadapt {

inline constexpr const char* kSinogramFormat = "ert-sino/1";

struct Observation {
    double theta = 0.0;  ///< [0, 2pi)
    double s = 0.0;      ///< [-1, 1]
    double y = 0.0;
    friend bool operator==(const Observation&, const Observation&) = default;
};

/// n noisy ERT samples at uniformly drawn lines, with generation metadata.
struct Sinogram {
    std::vector<Observation> samples;
    double mu = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string phantom_id;
    /// Hash of the run configuration that produced this file; empty if none.
    std::string config_hash;

    std::size_t n() const { return samples.size(); }
    friend bool operator==(const Sinogram&, const Sinogram&) = default;
};

/// Y_i = T_mu f(theta_i, s_i) + eps_i with theta ~ U[0, 2pi), s ~ U[-1, 1],
/// eps ~ N(0, sigma^2). Draws for sample i come from counter streams keyed by
/// (seed, i, channel); output does not depend on `workers`.
Sinogram sample_sinogram(const Phantom& ph, std::size_t n, double mu, double sigma,
                         std::uint64_t seed, std::size_t workers = 1);

/// Structured error for malformed sinogram files.
class SinogramParseError : public std::runtime_error {
public:
    SinogramParseError(const std::string& message, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// CSV body "theta,s,y" behind a "#key=value" header; doubles printed with
/// 17 significant digits so load() reproduces the values exactly.
void save_sinogram(const Sinogram& sg, const std::filesystem::path& path);
std::string format_sinogram(const Sinogram& sg);
Sinogram load_sinogram(const std::filesystem::path& path);
Sinogram parse_sinogram(const std::string& text);

}  // namespace ertadapt
