#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ertadapt/estimator.hpp"
#include "ertadapt/experiment.hpp"

namespace ertadapt {

inline constexpr const char* kReportFormat = "ert-report/1";
inline constexpr const char* kImageFormat = "ert-image/1";

/// Provenance written at the top of every output file.
struct OutputHeader {
    std::string format;
    std::string config_hash;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
};

/// "#format=...", "#config_hash=...", "#seed=..." lines.
std::string header_lines(const OutputHeader& h);

/// Reads the header of a CSV, PGM or JSON output file. Throws IoError if the
/// file cannot be read and std::domain_error if it carries no header.
OutputHeader read_header(const std::filesystem::path& path);

nlohmann::json to_json(const EstimatorConfig& cfg);
nlohmann::json to_json(const Calibration& cal);
nlohmann::json to_json(const VarianceReport& report);
nlohmann::json to_json(const RateReport& report);
nlohmann::json to_json(const std::vector<Assertion>& checks);

/// CSV with one row per (n, x, statistic): n,x,y,delta,statistic,value,se.
std::string calibration_csv(const Calibration& cal, const OutputHeader& h);
std::string variance_csv(const VarianceReport& report, const OutputHeader& h);
std::string rate_csv(const RateReport& report, const OutputHeader& h);

/// ASCII PGM (P2) of the values scaled to 0..255, header in comments.
std::string image_pgm(const Image& img, const OutputHeader& h);
/// row,col,x,y,delta_bar,value
std::string image_csv(const Image& img, const OutputHeader& h);

/// gnuplot script plotting log MSE (or variance) against log n from a report CSV.
std::string plot_script(const std::string& csv_name, const std::string& statistic);

/// Writes text to path, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ertadapt
