#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ertadapt/experiment.hpp"
#include "ertadapt/kernel.hpp"

namespace ertadapt {

/// Schema violation; the message starts with the offending path.
class ConfigError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct CalibrationSettings {
    std::size_t n = 4096;
    std::size_t replicates = 200;
    Point point{};
};

/// Validated run configuration.
///
/// Sections: phantom, noise {mu, sigma}, grid {a},
/// constants {c_star, c_dstar, d2, big_l} or "calibrate", campaign, output_dir, seed.
/// `doc` is the normalized document with defaults filled in; its hash
/// identifies every output produced from this configuration.
struct RunConfig {
    nlohmann::json doc;
    Campaign campaign;
    std::optional<EstimatorConfig> constants;  ///< nullopt: calibrate before use
    CalibrationSettings calibration;
    ImageSpec image;
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    static RunConfig from_json(const nlohmann::json& doc);
    std::string hash() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of the compact, key-sorted JSON text, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

}  // namespace ertadapt
