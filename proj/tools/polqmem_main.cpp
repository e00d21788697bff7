#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "polqmem/experiments.hpp"
#include "polqmem/version.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    bool plot = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Config file (INI-style)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", flags.seed, "Override the config seed");
    cmd->add_option("--out", flags.out_dir, "Output directory (default: .)");
    cmd->add_flag("--plot", flags.plot, "Also write an SVG chart per table");
}

polqmem::ExperimentConfig resolve_config(const CommonFlags& flags) {
    polqmem::ExperimentConfig cfg;
    if (!flags.config_path.empty()) {
        cfg = polqmem::load_config_file(flags.config_path);
    }
    if (flags.seed) {
        cfg.seed = *flags.seed;
    }
    return cfg;
}

void emit(const polqmem::RunReport& report, const CommonFlags& flags) {
    const auto written = polqmem::write_report(report, flags.out_dir, flags.plot);
    for (const std::string& path : written) {
        std::cout << "wrote " << path << "\n";
    }
}

std::map<std::string, polqmem::CountRecord> load_counts_dir(
    const std::string& dir, const polqmem::ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    std::map<std::string, polqmem::CountRecord> records;
    for (const std::string& label : cfg.states) {
        // "+" is awkward in file names; counts files use D for that state.
        const std::string file_label = (label == "+") ? "D" : label;
        const fs::path path = fs::path(dir) / ("counts_" + file_label + ".txt");
        std::ifstream in(path);
        if (!in) {
            throw polqmem::InvalidInput("missing count file: " + path.string());
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        records[label] = polqmem::CountRecord::from_text(buf.str());
    }
    return records;
}

void write_counts(const std::map<std::string, polqmem::CountRecord>& records,
                  const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    for (const auto& [label, record] : records) {
        const std::string file_label = (label == "+") ? "D" : label;
        const fs::path path = fs::path(out_dir) / ("counts_" + file_label + ".txt");
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw polqmem::Error("cannot write " + path.string());
        }
        out << record.to_text();
        std::cout << "wrote " << path.string() << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polarization qubit storage in birefringent, anisotropically "
                 "absorbing quantum memories"};
    app.set_version_flag("--version", polqmem::kVersion);
    app.require_subcommand(1);

    CommonFlags flags;
    std::string counts_dir;
    bool dump_counts = false;

    CLI::App* depth = app.add_subcommand(
        "depth-sweep", "Optical depth vs input polarization angle");
    add_common(depth, flags);
    CLI::App* eff = app.add_subcommand(
        "efficiency-sweep", "Recall efficiency vs input polarization angle");
    add_common(eff, flags);
    CLI::App* profile = app.add_subcommand(
        "profile", "Intensity and phase along the propagation path");
    add_common(profile, flags);
    CLI::App* tomo = app.add_subcommand(
        "tomography", "Simulate storage, reconstruct the recalled states");
    add_common(tomo, flags);
    tomo->add_option("--counts-dir", counts_dir,
                     "Reconstruct from measured count files instead of "
                     "simulating (counts_<state>.txt per state)")
        ->check(CLI::ExistingDirectory);
    tomo->add_flag("--dump-counts", dump_counts,
                   "Also write the simulated count records");
    CLI::App* stats = app.add_subcommand(
        "stats", "Photon-pair source correlation statistics");
    add_common(stats, flags);
    CLI::App* selfcheck = app.add_subcommand(
        "selfcheck", "Run internal consistency checks");
    add_common(selfcheck, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (selfcheck->parsed()) {
            const int failures = polqmem::run_selfcheck(std::cout);
            if (failures > 0) {
                std::cout << failures << " check(s) failed\n";
                return 3;
            }
            std::cout << "all checks passed\n";
            return 0;
        }
        const polqmem::ExperimentConfig cfg = resolve_config(flags);
        if (depth->parsed()) {
            emit(polqmem::run_depth_sweep(cfg), flags);
        } else if (eff->parsed()) {
            emit(polqmem::run_efficiency_sweep(cfg), flags);
        } else if (profile->parsed()) {
            emit(polqmem::run_profile(cfg), flags);
        } else if (tomo->parsed()) {
            if (!counts_dir.empty()) {
                const auto records = load_counts_dir(counts_dir, cfg);
                emit(polqmem::run_tomography_experiment(cfg, &records), flags);
            } else {
                if (dump_counts) {
                    write_counts(polqmem::simulate_tomography_counts(cfg),
                                 flags.out_dir);
                }
                emit(polqmem::run_tomography_experiment(cfg), flags);
            }
        } else if (stats->parsed()) {
            emit(polqmem::run_stats(cfg), flags);
        }
    } catch (const polqmem::ConfigError& e) {
        std::cerr << "config error";
        if (e.line > 0) {
            std::cerr << " (line " << e.line << ")";
        }
        if (!e.key.empty()) {
            std::cerr << " [" << e.key << "]";
        }
        std::cerr << ": " << e.what() << "\n";
        return 2;
    } catch (const polqmem::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
