#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polqmem/afc.hpp"
#include "polqmem/crystal.hpp"
#include "polqmem/errors.hpp"
#include "polqmem/photon_stats.hpp"

namespace polqmem {

// A config file failed to parse or describes an impossible experiment.
// line is 0 for semantic errors not tied to one line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0, std::string key = {})
        : Error(what), line(line), key(std::move(key)) {}

    int line = 0;
    std::string key;
};

inline constexpr double deg_to_rad(double deg) {
    return deg * 3.141592653589793238462643383279502884 / 180.0;
}

// Everything a run needs, as read from an INI-style config file.
// Angles are degrees here and converted to radians at this boundary
// only. d1/d2 are the summed optical depths of the whole arrangement
// (for a pair, each crystal carries half).
//
// The imperfection defaults below are the documented knob settings that
// reproduce the measured storage fidelities; set them to zero for the
// ideal scheme.
struct ExperimentConfig {
    // [arrangement]
    std::string kind = "hwp_pair";
    double d1 = 2.70;
    double d2 = 0.99;
    // Per-crystal birefringent phase. When absent it derives from
    // delta_n, length and wavelength.
    std::optional<double> biref_phase_deg;
    double length_mm = 10.0;
    double wavelength_nm = 883.0;
    double delta_n = kDefaultDeltaN;
    // Imperfection defaults are calibrated so the stock hwp_pair setup
    // shows a compensated-depth ripple of ~16% of the mean across input
    // angles and storage fidelities in the 0.95-0.99 band (average
    // ~0.975), i.e. a realistically imperfect bench rather than the
    // textbook scheme.
    double hwp_retardance_error_deg = 14.8;
    double hwp_angle_error_deg = 3.3;
    double misalignment_deg = 1.7;
    double window_phase_in_deg = 12.0;
    double window_phase_out_deg = 10.0;

    // [afc]
    double finesse = 3.165;
    double decoherence_factor = 0.6475;
    std::string readout = "forward";

    // [sweep]
    double angle_start_deg = 0.0;
    double angle_stop_deg = 180.0;
    double angle_step_deg = 5.0;
    std::string profile_state = "D";
    long profile_samples = 2001;

    // [tomography]
    std::vector<std::string> states = {"H", "V", "L", "+", "Q"};
    long long n_per_setting = 10000;
    long mc_trials = 200;

    // [source]
    double mean_n = 0.25;
    std::optional<int> cutoff;

    // [run]
    std::uint64_t seed = 42;

    bool operator==(const ExperimentConfig&) const = default;
};

// Parses config text. Unknown sections or keys, malformed values,
// duplicate keys and semantically impossible settings all raise
// ConfigError with the offending line and key where applicable.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config_file(const std::string& path);

// Canonical text form: fixed section and key order, lossless numbers.
// parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ExperimentConfig& c);

// FNV-1a over the canonical text, so semantically equal configs hash
// equally.
std::uint64_t config_hash(const ExperimentConfig& c);

std::string hash_hex(std::uint64_t h);

// Builders. Throw ConfigError when the config describes an invalid
// experiment.
Arrangement arrangement_from_config(const ExperimentConfig& c);
AfcSpec afc_from_config(const ExperimentConfig& c);
TmssSpec tmss_from_config(const ExperimentConfig& c);

// Sweep grid in degrees: start, start+step, ... (stop exclusive).
std::vector<double> sweep_angles_deg(const ExperimentConfig& c);

}  // namespace polqmem
