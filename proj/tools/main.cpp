#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ertadapt/config.hpp"
#include "ertadapt/errors.hpp"
#include "ertadapt/estimator.hpp"
#include "ertadapt/experiment.hpp"
#include "ertadapt/parallel.hpp"
#include "ertadapt/report.hpp"
#include "ertadapt/rng.hpp"
#include "ertadapt/simulate.hpp"

namespace fs = std::filesystem;
using namespace ertadapt;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInput = 2, kAssertion = 3, kIo = 4 };

constexpr std::uint64_t kCalibrationTag = 0xCA11B7A7EULL;

struct Globals {
    std::size_t threads = 0;
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
};

class AssertionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::size_t workers(const Globals& g) { return g.threads > 0 ? g.threads : default_workers(); }

RunConfig load_config(const std::string& path, const Globals& g) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open " + path);
    json doc;
    try {
        doc = json::parse(file);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    if (g.seed && doc.is_object()) doc["seed"] = *g.seed;
    RunConfig rc = RunConfig::from_json(doc);
    rc.campaign.workers = workers(g);
    return rc;
}

OutputHeader header_for(const RunConfig& rc, const char* format) {
    return {format, rc.hash(), rc.seed};
}

Calibration calibrate(const RunConfig& rc, std::size_t w) {
    const Campaign& c = rc.campaign;
    const Phantom ph = c.phantom_for(rc.calibration.n);
    return calibrate_constants(ph, c.mu, c.sigma, rc.calibration.n, rc.calibration.replicates,
                               derive_seed(rc.seed, kCalibrationTag), rc.calibration.point, c.a, w);
}

EstimatorConfig resolve_constants(const RunConfig& rc, std::size_t w) {
    if (rc.constants) return *rc.constants;
    std::cerr << "calibrating constants (n=" << rc.calibration.n << ", R=" << rc.calibration.replicates
              << ")\n";
    return calibrate(rc, w).cfg;
}

void print_checks(const std::vector<Assertion>& checks) {
    for (const auto& a : checks) {
        std::printf("%s %s = %.6g in [%.6g, %.6g]\n", a.pass ? "PASS" : "FAIL", a.name.c_str(), a.value,
                    a.lo, a.hi);
    }
}

void require_checks(const std::vector<Assertion>& checks) {
    for (const auto& a : checks)
        if (!a.pass) throw AssertionFailure("statistical assertion failed: " + a.name);
}

int cmd_simulate(const std::string& config_path, std::size_t n, const std::string& out, const Globals& g) {
    const RunConfig rc = load_config(config_path, g);
    const Phantom ph = rc.campaign.phantom_for(n);
    if (n == 0) throw ConfigError("--n must be ≥ 1");
    std::printf("seed %llu\n", static_cast<unsigned long long>(rc.seed));
    std::printf("forward model: %s, n=%zu, mu=%g, sigma=%g\n", ph.id().c_str(), n, rc.campaign.mu,
                rc.campaign.sigma);
    if (g.dry_run) {
        std::printf("dry run: would write %s\n", out.c_str());
        return kOk;
    }
    Sinogram sg = sample_sinogram(ph, n, rc.campaign.mu, rc.campaign.sigma, rc.seed, workers(g));
    sg.config_hash = rc.hash();
    save_sinogram(sg, out);
    std::printf("wrote %s\n", out.c_str());
    return kOk;
}

int cmd_estimate(const std::string& sino_path, const std::vector<double>& xy, const std::string& config_path,
                 const std::string& out, const Globals& g) {
    const RunConfig rc = load_config(config_path, g);
    const Sinogram sg = load_sinogram(sino_path);
    const Point x{xy.at(0), xy.at(1)};
    const bool outside = std::abs(x.x) > 1.0 || std::abs(x.y) > 1.0;
    if (outside) std::cerr << "warning: x lies outside [-1,1]^2\n";
    if (sg.mu != rc.campaign.mu)
        std::cerr << "warning: sinogram mu " << sg.mu << " differs from config mu " << rc.campaign.mu
                  << "; using the sinogram's\n";
    if (g.dry_run) {
        std::printf("dry run: would estimate at (%g, %g) from %zu samples\n", x.x, x.y, sg.n());
        return kOk;
    }
    const EstimatorConfig cfg = resolve_constants(rc, workers(g));
    const BandwidthGrid grid = make_grid(sg.n(), cfg.a);
    const PointEstimate pe = lepski_select(sg, x, grid, cfg);
    json doc = to_json(pe);
    doc["outside_unit_square"] = outside;
    doc["constants"] = to_json(cfg);
    doc["header"] = header_for(rc, "ert-estimate/1").to_json();
    std::printf("delta_bar %.17g\nf* %.17g\n", pe.delta_bar, pe.value);
    std::printf("%-24s %-24s\n", "delta", "estimate");
    for (const auto& l : pe.per_level) std::printf("%-24.17g %-24.17g\n", l.delta, l.estimate);
    if (!out.empty()) write_text(out, doc.dump(2) + "\n");
    else std::printf("%s\n", doc.dump(2).c_str());
    return kOk;
}

int cmd_reconstruct(const std::string& sino_path, std::size_t pixels, const std::string& config_path,
                    const Globals& g) {
    RunConfig rc = load_config(config_path, g);
    const Sinogram sg = load_sinogram(sino_path);
    ImageSpec spec = rc.image;
    if (pixels > 0) spec.width = spec.height = pixels;
    const fs::path dir = rc.output_dir;
    if (g.dry_run) {
        std::printf("dry run: %zux%zu pixels from %zu samples -> %s, %s\n", spec.width, spec.height, sg.n(),
                    (dir / "image.pgm").c_str(), (dir / "delta_bar.csv").c_str());
        return kOk;
    }
    const EstimatorConfig cfg = resolve_constants(rc, workers(g));
    const Image img = reconstruct_image(sg, spec, cfg, workers(g));
    const OutputHeader h = header_for(rc, kImageFormat);
    write_text(dir / "image.pgm", image_pgm(img, h));
    write_text(dir / "delta_bar.csv", image_csv(img, h));
    std::printf("wrote %s and %s\n", (dir / "image.pgm").c_str(), (dir / "delta_bar.csv").c_str());
    return kOk;
}

void write_report(const fs::path& dir, const std::string& stem, const std::string& csv, json summary,
                  const RunConfig& rc, const std::string& statistic) {
    summary["header"] = header_for(rc, kReportFormat).to_json();
    summary["config"] = rc.doc;
    write_text(dir / (stem + ".csv"), csv);
    write_text(dir / (stem + ".json"), summary.dump(2) + "\n");
    write_text(dir / (stem + ".gp"), plot_script(stem + ".csv", statistic));
    std::printf("wrote %s.{csv,json,gp} in %s\n", stem.c_str(), dir.c_str());
}

int cmd_calibrate(const std::string& config_path, const Globals& g) {
    const RunConfig rc = load_config(config_path, g);
    const fs::path dir = rc.output_dir;
    if (g.dry_run) {
        std::printf("dry run: calibrate at n=%zu with R=%zu -> %s\n", rc.calibration.n,
                    rc.calibration.replicates, (dir / "calibration.csv").c_str());
        return kOk;
    }
    const Calibration cal = calibrate(rc, workers(g));
    std::printf("%s\n", to_json(cal.cfg).dump(2).c_str());
    write_report(dir, "calibration", calibration_csv(cal, header_for(rc, kReportFormat)), to_json(cal), rc,
                 "variance");
    return kOk;
}

int cmd_rate(const std::string& config_path, const Globals& g) {
    const RunConfig rc = load_config(config_path, g);
    const Campaign& c = rc.campaign;
    const fs::path dir = rc.output_dir;
    const Phantom first = c.phantom_for(c.n_values.empty() ? rc.calibration.n : c.n_values.front());
    if (std::holds_alternative<DiskIndicator>(first.kind()) &&
        (c.mode == CampaignMode::RateScan || c.mode == CampaignMode::OracleCompare))
        std::cerr << "warning: the disk indicator lies outside the rate regime (smoothness 1/2)\n";
    if (g.dry_run) {
        std::printf("plan: mode %s, config %s, seed %llu\n", mode_name(c.mode).c_str(), rc.hash().c_str(),
                    static_cast<unsigned long long>(rc.seed));
        if (!rc.constants)
            std::printf("  calibrate: n=%zu, R=%zu\n", rc.calibration.n, rc.calibration.replicates);
        for (auto n : c.n_values)
            std::printf("  n=%zu: %zu replicates x %zu points (%zu grid levels)\n", n, c.replicates,
                        c.points.size(), make_grid(n, c.a).size());
        std::printf("  output: %s\n", dir.c_str());
        return kOk;
    }
    const std::size_t w = workers(g);
    switch (c.mode) {
        case CampaignMode::Calibrate:
            return cmd_calibrate(config_path, g);
        case CampaignMode::VarianceScan: {
            const VarianceReport rep = run_variance_scan(c);
            write_report(dir, "variance", variance_csv(rep, header_for(rc, kReportFormat)), to_json(rep), rc,
                         "variance");
            print_checks(rep.checks);
            require_checks(rep.checks);
            return kOk;
        }
        case CampaignMode::RateScan:
        case CampaignMode::OracleCompare: {
            const EstimatorConfig cfg = resolve_constants(rc, w);
            RateReport rep = run_scan(c, cfg);
            if (c.mode == CampaignMode::RateScan) {
                if (!rep.zero_signal && !first.is_rate_regime())
                    throw ConfigError("rate scan needs a phantom with effective smoothness > 1");
                add_rate_checks(rep);
            } else {
                add_oracle_checks(rep);
            }
            json summary = to_json(rep);
            summary["constants"] = to_json(cfg);
            write_report(dir, c.mode == CampaignMode::RateScan ? "rate" : "oracle",
                         rate_csv(rep, header_for(rc, kReportFormat)), summary, rc, "mse");
            print_checks(rep.checks);
            require_checks(rep.checks);
            return kOk;
        }
        case CampaignMode::Reconstruct:
            throw ConfigError("campaign.mode: reconstruct runs through the reconstruct subcommand");
    }
    return kOk;
}

int cmd_verify(const std::string& config_path, const std::vector<std::string>& files, const Globals& g) {
    const RunConfig rc = load_config(config_path, g);
    const std::string expected = rc.hash();
    int status = kOk;
    for (const auto& f : files) {
        std::string found;
        if (fs::path(f).extension() == ".csv" || fs::path(f).extension() == ".pgm" ||
            fs::path(f).extension() == ".json" || fs::path(f).extension() == ".gp") {
            try {
                found = read_header(f).config_hash;
            } catch (const std::domain_error&) {
                found = load_sinogram(f).config_hash;
            }
        } else {
            found = load_sinogram(f).config_hash;
        }
        const bool ok = found == expected;
        std::printf("%s %s (file %s, config %s)\n", ok ? "OK" : "MISMATCH", f.c_str(),
                    found.empty() ? "<none>" : found.c_str(), expected.c_str());
        if (!ok) status = kInput;
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive pointwise estimation from noisy exponential Radon transform data"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--threads", g.threads, "Worker threads (default: ERT_ADAPT_THREADS or 1)");
    app.add_option("--seed", g.seed, "Override the config seed");
    app.add_flag("--dry-run", g.dry_run, "Print the plan and touch no files");

    std::string config, out, sino;
    std::size_t n = 0, pixels = 0;
    std::vector<double> xy;
    std::vector<std::string> files;

    auto* sim = app.add_subcommand("simulate", "Draw a noisy sinogram");
    sim->add_option("--config", config, "Run configuration (JSON)")->required();
    sim->add_option("--n", n, "Number of samples")->required();
    sim->add_option("--out", out, "Output sinogram CSV")->required();

    auto* est = app.add_subcommand("estimate", "Adaptive estimate at one point");
    est->add_option("sinogram", sino, "Sinogram CSV")->required();
    est->add_option("--x", xy, "Evaluation point")->expected(2)->required();
    est->add_option("--config", config, "Run configuration (JSON)")->required();
    est->add_option("--out", out, "Write the estimate JSON here");

    auto* rec = app.add_subcommand("reconstruct", "Per-pixel adaptive reconstruction");
    rec->add_option("sinogram", sino, "Sinogram CSV")->required();
    rec->add_option("--config", config, "Run configuration (JSON)")->required();
    rec->add_option("--pixels", pixels, "Image width and height");

    auto* rate = app.add_subcommand("rate", "Run the configured Monte Carlo campaign");
    rate->add_option("--config", config, "Run configuration (JSON)")->required();

    auto* cal = app.add_subcommand("calibrate", "Fit the variance constants");
    cal->add_option("--config", config, "Run configuration (JSON)")->required();

    auto* ver = app.add_subcommand("verify", "Check output headers against a config hash");
    ver->add_option("--config", config, "Run configuration (JSON)")->required();
    ver->add_option("files", files, "Output files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*sim) return cmd_simulate(config, n, out, g);
        if (*est) return cmd_estimate(sino, xy, config, out, g);
        if (*rec) return cmd_reconstruct(sino, pixels, config, g);
        if (*rate) return cmd_rate(config, g);
        if (*cal) return cmd_calibrate(config, g);
        if (*ver) return cmd_verify(config, files, g);
    } catch (const AssertionFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kAssertion;
    } catch (const CalibrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kAssertion;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const SinogramParseError& e) {
        std::cerr << "error: " << sino << ": " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    }
    return kOk;
}
