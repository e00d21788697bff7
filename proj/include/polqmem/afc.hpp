#pragma once

#include "polqmem/crystal.hpp"
#include "polqmem/jones.hpp"

namespace polqmem {

enum class Readout { forward, backward };

// Atomic-frequency-comb preparation of the absorption profile. The comb
// rescales every optical depth to d/finesse; dephasing between
// absorption and re-emission multiplies the echo amplitude by
// decoherence_factor. Comb spacing, storage time and comb width set the
// storage bandwidth but do not enter the polarization model, so they
// are not parameters here.
struct AfcSpec {
    double finesse = 1.0;              // >= 1
    double decoherence_factor = 1.0;   // in [0, 1]
    Readout readout = Readout::forward;

    void validate() const;
};

// Optical depth seen by the comb-prepared medium: d / finesse.
double comb_depth(double optical_depth, const AfcSpec& afc);

// First-echo amplitude of a comb of depth d (per polarization
// component, decoherence excluded): d * exp(-d/2).
double forward_echo_amplitude(double comb_d);

// |forward_echo_amplitude * decoherence|^2. Maximal value
// 4 e^-2 * c^2 at comb depth 2.
double forward_efficiency(double comb_d, const AfcSpec& afc);

// Ideal recall efficiency for backward re-emission, (1 - exp(-d))^2.
// Approaches 1 at large comb depth; multiply by decoherence^2 for a
// dephased comb.
double backward_efficiency(double comb_d);

// Echo transfer matrix of one comb-prepared crystal in its axis frame.
//
// Forward: diag(d1~ e^{-d1~/2}, e^{i phi} d2~ e^{-d2~/2}) * c, with
// comb-scaled depths d~ and the full (unscaled) birefringent phase phi:
// the index contrast is a property of the host, not of the comb.
//
// Backward: every absorption depth z contributes amplitude
// e^{-alpha z/2} (in) * e^{-alpha z/2} (out), which integrates to
// 1 - e^{-d~} per component. Birefringence makes the two passes
// accumulate a z-dependent phase 2 k dn z that dephases the sum, so
// backward recall is refused (UnsupportedConfiguration) unless the
// crystal's birefringent phase is zero (within 1e-12).
JonesMatrix memory_matrix_single(const CrystalSpec& c, const AfcSpec& afc);

// Echo transfer matrix of a comb-prepared pair arrangement in the lab
// frame, window phases included. The photon is stored in either
// crystal; the two emission paths add coherently:
//   forward: M'_B X M_A + M_B X M'_A  (X = inter-crystal element)
// For the ideal compensation arrangements this sum is
// e^{i phi} (d1~ + d2~) e^{-(d1~+d2~)/2} * c times the identity
// (rotated_pair) or times the component swap (hwp_pair).
//
// Backward recall is supported only for zero birefringent phase, zero
// plate errors and zero misalignment; it returns
// diag(1 - e^{-D1}, 1 - e^{-D2}) * c with D the summed comb depth each
// lab component crosses, and no swap (a plate between the crystals is
// traversed twice). Throws InvalidInput for single arrangements and
// UnsupportedConfiguration for unsupported backward cases.
JonesMatrix memory_matrix_pair(const Arrangement& a, const AfcSpec& afc);

struct MemoryResult {
    JonesVector output_state;     // normalized; equals input if nothing returns
    double efficiency = 0.0;      // recalled intensity fraction
    double transmitted_leakage = 0.0;  // fraction passing the comb unabsorbed
};

// Full store-and-recall of a normalized input state through a single
// crystal or a pair arrangement. Leakage is the first-pass transmission
// through the comb-prepared medium.
MemoryResult store_and_retrieve(const JonesVector& input, const Arrangement& a,
                                const AfcSpec& afc);

}  // namespace polqmem
