#pragma once

#include <vector>

namespace polqmem {

// Photon-pair source modeled as a two-mode squeezed state. Tracing out
// one mode leaves a thermal photon-number distribution
//   P(n) = mean_n^n / (1 + mean_n)^(n+1)
// in the other. cutoff is the largest photon number kept by the
// truncated distribution; the neglected tail mass (mean_n/(1+mean_n))^
// (cutoff+1) must stay below kMaxTailMass.
struct TmssSpec {
    double mean_n = 0.0;
    int cutoff = 0;

    // Smallest cutoff whose tail mass is below kMaxTailMass, capped at
    // kDefaultCutoffCap. For mean photon numbers where the cap is not
    // enough, construct the spec with an explicit cutoff.
    static TmssSpec with_default_cutoff(double mean_n);

    void validate() const;  // throws InvalidInput / CutoffTooSmall
};

inline constexpr double kMaxTailMass = 1e-12;
inline constexpr int kDefaultCutoffCap = 200;

// Truncated, renormalized photon-number distribution P(0..cutoff).
std::vector<double> photon_number_dist(const TmssSpec& s);

// Normalized signal-idler cross-correlation g2_si. For a two-mode
// squeezed state the perfect number correlation between the modes gives
// g2_si = <n^2>/<n>^2 of the thermal marginal, i.e. 2 + 1/mean_n.
// Computed as a brute-force sum over the truncated distribution.
double cross_correlation(const TmssSpec& s);

// Autocorrelation of the signal conditioned on an idler detection.
// Heralding reweights the distribution to P'(n) proportional to
// n * P(n); the result is <n(n-1)>'/<n>'^2, again by brute-force sum.
double heralded_auto_correlation(const TmssSpec& s);

// Upper bound on the heralded autocorrelation implied by a measured
// cross-correlation: inverts g2_si -> mean_n (bisection; g2_si is
// strictly decreasing in mean_n) and evaluates the heralded
// autocorrelation there. Requires g2_si > 2, the thermal-statistics
// floor; values at or below it admit no mean photon number
// (OutOfModel).
double bound_from_cross(double g2_si);

enum class Nonclassicality { nonclassical, classical_compatible };

// Two classical thermal beams reach at most g2_si = 2; anything above
// witnesses nonclassical signal-idler correlations.
Nonclassicality nonclassicality_check(double g2_si);

}  // namespace polqmem
