#pragma once

#include <optional>
#include <vector>

#include "polqmem/jones.hpp"

namespace polqmem {

inline constexpr double kDefaultCrystalLength = 0.01;    // m
inline constexpr double kDefaultWavelength = 883e-9;     // m
inline constexpr double kDefaultBeatLength = 100e-6;     // m
// Index difference giving one full beat every kDefaultBeatLength.
inline constexpr double kDefaultDeltaN = kDefaultWavelength / kDefaultBeatLength;

// Uniaxial absorber with principal axes D1, D2. Absorption is
// anisotropic (alpha1 != alpha2) and the axes see different refractive
// indices (delta_n = n2 - n1), so a single crystal acts as the product
// of a diagonal loss element and a diagonal phase element.
struct CrystalSpec {
    double alpha1 = 0.0;      // absorption coefficient along D1, 1/m
    double alpha2 = 0.0;      // absorption coefficient along D2, 1/m
    double length = kDefaultCrystalLength;
    double delta_n = kDefaultDeltaN;
    double wavelength = kDefaultWavelength;

    double d1() const { return alpha1 * length; }
    double d2() const { return alpha2 * length; }
    // Phase walk-off between D2 and D1 over the full length, k*dn*L.
    double biref_phase() const;

    // Builds a spec from target optical depths and total birefringent
    // phase instead of material coefficients.
    static CrystalSpec from_depths(double d1, double d2, double biref_phase_rad,
                                   double length = kDefaultCrystalLength,
                                   double wavelength = kDefaultWavelength);

    // Throws InvalidInput on negative absorption or nonpositive
    // length/wavelength.
    void validate() const;
};

enum class ArrangementKind { single, rotated_pair, hwp_pair, aligned_pair };

// One or two crystals plus the optional elements between and around
// them. In the two-crystal compensation scheme the second crystal is
// effectively rotated by 90 degrees relative to the first, either
// physically (rotated_pair) or by a half-wave plate at 45 degrees
// between two aligned crystals (hwp_pair). aligned_pair (no rotation,
// no plate) is the uncompensated reference.
//
// Error knobs are zero for the ideal scheme:
//   hwp_retardance_error  extra retardance of the plate beyond pi, rad
//   hwp_angle_error       plate axis offset from 45 degrees, rad
//   misalignment          crystal B axis offset from nominal, rad
//   window_phase_in/out   birefringent phase of the cryostat windows, rad
struct Arrangement {
    ArrangementKind kind = ArrangementKind::single;
    CrystalSpec crystal_a;
    std::optional<CrystalSpec> crystal_b;

    double hwp_retardance_error = 0.0;
    double hwp_angle_error = 0.0;
    double misalignment = 0.0;
    double window_phase_in = 0.0;
    double window_phase_out = 0.0;

    bool is_pair() const { return kind != ArrangementKind::single; }
    double total_length() const;
    // Nominal rotation of crystal B's axes in the lab frame.
    double crystal_b_angle() const;

    static Arrangement single_crystal(const CrystalSpec& c);
    static Arrangement pair(ArrangementKind kind, const CrystalSpec& a,
                            const CrystalSpec& b);
    static Arrangement identical_pair(ArrangementKind kind, const CrystalSpec& c);
    // Convenience for quoting pair-total depths: each crystal gets half
    // of d1_total and d2_total plus the full per-crystal phase.
    static Arrangement pair_from_totals(ArrangementKind kind, double d1_total,
                                        double d2_total, double biref_phase_rad);

    void validate() const;
};

// Transfer matrix of one crystal in its own axis frame:
// pdl_matrix(d1, d2) * pmd_matrix(biref_phase).
JonesMatrix transmission_matrix(const CrystalSpec& c);

// Effective optical depth seen by a linear polarization at pol_angle_rad
// from D1 when both projections are detected without polarization
// analysis: -ln(exp(-d1) cos^2 + exp(-d2) sin^2).
double effective_optical_depth(double d1, double d2, double pol_angle_rad);

// Waveplate with the given retardance about an axis at axis_angle_rad:
// R(a) diag(1, exp(i*ret)) R(-a). A half-wave plate at 45 degrees swaps
// the components.
JonesMatrix waveplate_matrix(double retardance_rad, double axis_angle_rad);

// Element between the two crystals: the (possibly imperfect) half-wave
// plate for hwp_pair, the identity otherwise.
JonesMatrix inter_crystal_element(const Arrangement& a);

// Lab-frame transfer matrix of a full pair arrangement, including the
// inter-crystal element and the window phases. Throws InvalidInput for
// single-crystal arrangements.
JonesMatrix pair_transmission(const Arrangement& a);

// Propagates the input by splitting every crystal into n_layers equal
// slabs and applying them in order. Output is independent of n_layers;
// with n_layers = 1 each crystal contributes exactly its transmission
// matrix.
JonesVector layered_propagate(const Arrangement& a, const JonesVector& input,
                              long n_layers);

// State of the field at depth z. Intensities are per lab component;
// phases are accumulated (unwrapped) per component, referenced to the
// input so both start at zero.
struct ProfileSample {
    double z = 0.0;
    double intensity_d1 = 0.0;
    double intensity_d2 = 0.0;
    double phase_d1 = 0.0;
    double phase_d2 = 0.0;
};

// Samples the field at n_samples >= 2 evenly spaced depths from the
// entrance (z = 0, before the input window) to the exit (after the
// output window). Point elements at the A|B boundary act immediately
// after z = length_a. Sampling must be dense enough that the phase
// advances by less than pi between samples, or the unwrapped phases
// alias.
std::vector<ProfileSample> propagation_profile(const Arrangement& a,
                                               const JonesVector& input,
                                               long n_samples);

}  // namespace polqmem
