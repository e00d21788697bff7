#include "polqmem/afc.hpp"

#include <cmath>

#include "polqmem/errors.hpp"

namespace polqmem {

namespace {

constexpr double kPhaseTol = 1e-12;

// Comb-prepared transmission of one crystal in its axis frame.
JonesMatrix comb_transmission(const CrystalSpec& c, const AfcSpec& afc) {
    return pdl_matrix(comb_depth(c.d1(), afc), comb_depth(c.d2(), afc)) *
           pmd_matrix(c.biref_phase());
}

// Forward echo emission of one crystal in its axis frame (decoherence
// excluded; it is applied once per echo, not per crystal).
JonesMatrix echo_emission(const CrystalSpec& c, const AfcSpec& afc) {
    JonesMatrix m = JonesMatrix::Zero();
    m(0, 0) = forward_echo_amplitude(comb_depth(c.d1(), afc));
    m(1, 1) = std::polar(1.0, c.biref_phase()) *
              forward_echo_amplitude(comb_depth(c.d2(), afc));
    return m;
}

bool backward_supported(const Arrangement& a) {
    const bool phases_zero =
        std::abs(a.crystal_a.biref_phase()) <= kPhaseTol &&
        (!a.crystal_b || std::abs(a.crystal_b->biref_phase()) <= kPhaseTol);
    return phases_zero && a.hwp_retardance_error == 0.0 &&
           a.hwp_angle_error == 0.0 && a.misalignment == 0.0;
}

}  // namespace

void AfcSpec::validate() const {
    if (!(finesse >= 1.0) || !std::isfinite(finesse)) {
        throw InvalidInput("comb finesse must be >= 1");
    }
    if (!(decoherence_factor >= 0.0) || !(decoherence_factor <= 1.0)) {
        throw InvalidInput("decoherence factor must lie in [0, 1]");
    }
}

double comb_depth(double optical_depth, const AfcSpec& afc) {
    afc.validate();
    if (optical_depth < 0.0 || !std::isfinite(optical_depth)) {
        throw InvalidInput("optical depth must be nonnegative");
    }
    return optical_depth / afc.finesse;
}

double forward_echo_amplitude(double comb_d) {
    if (comb_d < 0.0 || !std::isfinite(comb_d)) {
        throw InvalidInput("comb depth must be nonnegative");
    }
    return comb_d * std::exp(-0.5 * comb_d);
}

double forward_efficiency(double comb_d, const AfcSpec& afc) {
    afc.validate();
    const double amp = forward_echo_amplitude(comb_d) * afc.decoherence_factor;
    return amp * amp;
}

double backward_efficiency(double comb_d) {
    if (comb_d < 0.0 || !std::isfinite(comb_d)) {
        throw InvalidInput("comb depth must be nonnegative");
    }
    const double a = 1.0 - std::exp(-comb_d);
    return a * a;
}

JonesMatrix memory_matrix_single(const CrystalSpec& c, const AfcSpec& afc) {
    c.validate();
    afc.validate();
    if (afc.readout == Readout::forward) {
        return afc.decoherence_factor * echo_emission(c, afc);
    }
    if (std::abs(c.biref_phase()) > kPhaseTol) {
        throw UnsupportedConfiguration(
            "backward recall dephases in a birefringent crystal; "
            "requires zero birefringent phase");
    }
    JonesMatrix m = JonesMatrix::Zero();
    m(0, 0) = 1.0 - std::exp(-comb_depth(c.d1(), afc));
    m(1, 1) = 1.0 - std::exp(-comb_depth(c.d2(), afc));
    return afc.decoherence_factor * m;
}

JonesMatrix memory_matrix_pair(const Arrangement& a, const AfcSpec& afc) {
    a.validate();
    afc.validate();
    if (!a.is_pair()) {
        throw InvalidInput("memory_matrix_pair requires a pair arrangement");
    }

    if (afc.readout == Readout::backward) {
        if (!backward_supported(a)) {
            throw UnsupportedConfiguration(
                "backward recall supported only for zero birefringent phase "
                "and zero plate/alignment errors");
        }
        // Which of B's depths a lab component crosses depends on whether
        // the pair is effectively crossed or aligned.
        const bool crossed = a.kind != ArrangementKind::aligned_pair;
        const double a1 = comb_depth(a.crystal_a.d1(), afc);
        const double a2 = comb_depth(a.crystal_a.d2(), afc);
        const double b1 = comb_depth(a.crystal_b->d1(), afc);
        const double b2 = comb_depth(a.crystal_b->d2(), afc);
        const double depth1 = a1 + (crossed ? b2 : b1);
        const double depth2 = a2 + (crossed ? b1 : b2);
        JonesMatrix m = JonesMatrix::Zero();
        m(0, 0) = 1.0 - std::exp(-depth1);
        m(1, 1) = 1.0 - std::exp(-depth2);
        // Exits through the entrance face: the input window is crossed
        // twice, the output window never.
        const JonesMatrix w_in = pmd_matrix(a.window_phase_in);
        return afc.decoherence_factor * (w_in * m * w_in);
    }

    const double theta = a.crystal_b_angle();
    const JonesMatrix rot = rotation_matrix(theta);
    const JonesMatrix rot_inv = rotation_matrix(-theta);
    const JonesMatrix x = inter_crystal_element(a);
    const JonesMatrix trans_a = comb_transmission(a.crystal_a, afc);
    const JonesMatrix trans_b = rot_inv * comb_transmission(*a.crystal_b, afc) * rot;
    const JonesMatrix emit_a = echo_emission(a.crystal_a, afc);
    const JonesMatrix emit_b = rot_inv * echo_emission(*a.crystal_b, afc) * rot;

    const JonesMatrix core = emit_b * x * trans_a + trans_b * x * emit_a;
    return afc.decoherence_factor * (pmd_matrix(a.window_phase_out) * core *
                                     pmd_matrix(a.window_phase_in));
}

MemoryResult store_and_retrieve(const JonesVector& input, const Arrangement& a,
                                const AfcSpec& afc) {
    if (!is_normalized(input, 1e-9)) {
        throw InvalidInput("input state must be normalized");
    }
    a.validate();
    afc.validate();

    JonesMatrix echo;
    if (a.is_pair()) {
        echo = memory_matrix_pair(a, afc);
    } else {
        echo = memory_matrix_single(a.crystal_a, afc);
        if (afc.readout == Readout::forward) {
            echo = pmd_matrix(a.window_phase_out) * echo * pmd_matrix(a.window_phase_in);
        } else {
            echo = pmd_matrix(a.window_phase_in) * echo * pmd_matrix(a.window_phase_in);
        }
    }

    // First-pass transmission through the comb-prepared medium.
    Arrangement prepared = a;
    prepared.crystal_a.alpha1 /= afc.finesse;
    prepared.crystal_a.alpha2 /= afc.finesse;
    if (prepared.crystal_b) {
        prepared.crystal_b->alpha1 /= afc.finesse;
        prepared.crystal_b->alpha2 /= afc.finesse;
    }
    JonesMatrix leak;
    if (prepared.is_pair()) {
        leak = pair_transmission(prepared);
    } else {
        leak = pmd_matrix(prepared.window_phase_out) *
               transmission_matrix(prepared.crystal_a) *
               pmd_matrix(prepared.window_phase_in);
    }

    MemoryResult r;
    const JonesVector out = echo * input;
    r.efficiency = intensity(out);
    r.transmitted_leakage = intensity(leak * input);
    if (r.efficiency > 1e-300) {
        r.output_state = out / std::sqrt(r.efficiency);
    } else {
        // Nothing returns; the recalled polarization is undefined and the
        // input is reported in its place.
        r.output_state = input;
        r.efficiency = 0.0;
    }
    return r;
}

}  // namespace polqmem
