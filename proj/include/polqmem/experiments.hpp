#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "polqmem/config.hpp"
#include "polqmem/report.hpp"
#include "polqmem/tomography.hpp"

namespace polqmem {

// Optical depth of the configured arrangement versus input polarization
// angle: the uncompensated (aligned) reference next to the configured
// arrangement's actual depth. Table "depth_sweep" with columns
// angle_deg, depth_uncompensated, depth_compensated.
RunReport run_depth_sweep(const ExperimentConfig& cfg);

// Recall efficiency versus input polarization angle, uncompensated
// reference versus configured arrangement. Table "efficiency_sweep"
// with columns angle_deg, efficiency_uncompensated,
// efficiency_compensated.
RunReport run_efficiency_sweep(const ExperimentConfig& cfg);

// Field intensities and accumulated phases along the beam path for the
// configured arrangement. Table "profile" with columns z_m,
// intensity_d1, intensity_d2, phase_d1_rad, phase_d2_rad.
RunReport run_profile(const ExperimentConfig& cfg);

// Stores each configured probe state, simulates projective counts on
// the recalled state, reconstructs it by maximum likelihood and reports
// the fidelity against the ideally stored state with a bootstrap
// uncertainty. Table "tomography" with columns state_label, fidelity,
// fidelity_sigma, g2_si, exceeds_classical_bound.
//
// external_counts, when given, replaces the simulation: each state
// label must map to a measured CountRecord.
RunReport run_tomography_experiment(
    const ExperimentConfig& cfg,
    const std::map<std::string, CountRecord>* external_counts = nullptr);

// Source statistics for the configured mean photon number. Table
// "stats" with columns mean_n, g2_si, g2_heralded, g2_heralded_bound,
// nonclassical.
RunReport run_stats(const ExperimentConfig& cfg);

// Simulated count records of the last tomography run, keyed by state
// label, for callers that want to persist them.
std::map<std::string, CountRecord> simulate_tomography_counts(
    const ExperimentConfig& cfg);

// Target state the arrangement should deliver for a given input when
// every error knob is zero (the swap for hwp_pair, the input itself for
// rotated_pair, the zero-knob output otherwise).
JonesVector ideal_stored_state(const ExperimentConfig& cfg,
                               const JonesVector& input);

// Runs a suite of internal consistency checks, printing one PASS/FAIL
// line each. Returns the number of failures.
int run_selfcheck(std::ostream& out);

}  // namespace polqmem
