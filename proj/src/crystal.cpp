#include "polqmem/crystal.hpp"

#include <cmath>
#include <numbers>

#include "polqmem/errors.hpp"

namespace polqmem {

namespace {

constexpr double kPi = std::numbers::pi;

// Loss-and-phase matrix of the first `z` meters of a crystal.
JonesMatrix partial_transmission(const CrystalSpec& c, double z) {
    const double phase = 2.0 * kPi * c.delta_n * z / c.wavelength;
    return pdl_matrix(c.alpha1 * z, c.alpha2 * z) * pmd_matrix(phase);
}

}  // namespace

double CrystalSpec::biref_phase() const {
    return 2.0 * kPi * delta_n * length / wavelength;
}

CrystalSpec CrystalSpec::from_depths(double d1, double d2, double biref_phase_rad,
                                     double length, double wavelength) {
    if (!(length > 0.0) || !(wavelength > 0.0)) {
        throw InvalidInput("crystal length and wavelength must be positive");
    }
    if (d1 < 0.0 || d2 < 0.0 || !std::isfinite(d1) || !std::isfinite(d2)) {
        throw InvalidInput("optical depths must be nonnegative");
    }
    CrystalSpec c;
    c.alpha1 = d1 / length;
    c.alpha2 = d2 / length;
    c.length = length;
    c.wavelength = wavelength;
    c.delta_n = biref_phase_rad * wavelength / (2.0 * kPi * length);
    return c;
}

void CrystalSpec::validate() const {
    if (!std::isfinite(alpha1) || !std::isfinite(alpha2) || alpha1 < 0.0 ||
        alpha2 < 0.0) {
        throw InvalidInput("absorption coefficients must be finite and nonnegative");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw InvalidInput("crystal length must be positive");
    }
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
        throw InvalidInput("wavelength must be positive");
    }
    if (!std::isfinite(delta_n)) {
        throw InvalidInput("index difference must be finite");
    }
}

double Arrangement::total_length() const {
    double l = crystal_a.length;
    if (crystal_b) {
        l += crystal_b->length;
    }
    return l;
}

double Arrangement::crystal_b_angle() const {
    const double nominal = (kind == ArrangementKind::rotated_pair) ? kPi / 2.0 : 0.0;
    return nominal + misalignment;
}

Arrangement Arrangement::single_crystal(const CrystalSpec& c) {
    Arrangement a;
    a.kind = ArrangementKind::single;
    a.crystal_a = c;
    a.validate();
    return a;
}

Arrangement Arrangement::pair(ArrangementKind kind, const CrystalSpec& a,
                              const CrystalSpec& b) {
    if (kind == ArrangementKind::single) {
        throw InvalidInput("pair arrangement requires a pair kind");
    }
    Arrangement arr;
    arr.kind = kind;
    arr.crystal_a = a;
    arr.crystal_b = b;
    arr.validate();
    return arr;
}

Arrangement Arrangement::identical_pair(ArrangementKind kind, const CrystalSpec& c) {
    return pair(kind, c, c);
}

Arrangement Arrangement::pair_from_totals(ArrangementKind kind, double d1_total,
                                          double d2_total, double biref_phase_rad) {
    const CrystalSpec c =
        CrystalSpec::from_depths(0.5 * d1_total, 0.5 * d2_total, biref_phase_rad);
    return identical_pair(kind, c);
}

void Arrangement::validate() const {
    crystal_a.validate();
    if (kind == ArrangementKind::single) {
        if (crystal_b) {
            throw InvalidInput("single arrangement must not carry a second crystal");
        }
    } else {
        if (!crystal_b) {
            throw InvalidInput("pair arrangement requires a second crystal");
        }
        crystal_b->validate();
    }
    for (double knob : {hwp_retardance_error, hwp_angle_error, misalignment,
                        window_phase_in, window_phase_out}) {
        if (!std::isfinite(knob)) {
            throw InvalidInput("error parameters must be finite");
        }
    }
    if (kind != ArrangementKind::hwp_pair &&
        (hwp_retardance_error != 0.0 || hwp_angle_error != 0.0)) {
        throw InvalidInput("wave-plate error parameters require hwp_pair");
    }
    if (kind == ArrangementKind::single && misalignment != 0.0) {
        throw InvalidInput("misalignment requires a pair arrangement");
    }
}

JonesMatrix transmission_matrix(const CrystalSpec& c) {
    c.validate();
    return pdl_matrix(c.d1(), c.d2()) * pmd_matrix(c.biref_phase());
}

double effective_optical_depth(double d1, double d2, double pol_angle_rad) {
    if (d1 < 0.0 || d2 < 0.0 || !std::isfinite(d1) || !std::isfinite(d2)) {
        throw InvalidInput("optical depths must be nonnegative");
    }
    if (!std::isfinite(pol_angle_rad)) {
        throw InvalidInput("polarization angle must be finite");
    }
    const double c = std::cos(pol_angle_rad);
    const double s = std::sin(pol_angle_rad);
    // -log(e^{-d1} cos^2 + e^{-d2} sin^2) as a log-sum-exp so the
    // principal angles return d1/d2 without exp/log round-trip error.
    const double t1 = -d1 + std::log(c * c);  // -inf when the weight is 0
    const double t2 = -d2 + std::log(s * s);
    const double hi = std::max(t1, t2);
    const double lo = std::min(t1, t2);
    return -(hi + std::log1p(std::exp(lo - hi)));
}

JonesMatrix waveplate_matrix(double retardance_rad, double axis_angle_rad) {
    return rotation_matrix(axis_angle_rad) * pmd_matrix(retardance_rad) *
           rotation_matrix(-axis_angle_rad);
}

JonesMatrix inter_crystal_element(const Arrangement& a) {
    if (a.kind == ArrangementKind::hwp_pair) {
        return waveplate_matrix(kPi + a.hwp_retardance_error,
                                kPi / 4.0 + a.hwp_angle_error);
    }
    return JonesMatrix::Identity();
}

JonesMatrix pair_transmission(const Arrangement& a) {
    a.validate();
    if (!a.is_pair()) {
        throw InvalidInput("pair_transmission requires a pair arrangement");
    }
    const double theta = a.crystal_b_angle();
    const JonesMatrix m_a = transmission_matrix(a.crystal_a);
    const JonesMatrix m_b_lab = rotation_matrix(-theta) *
                                transmission_matrix(*a.crystal_b) *
                                rotation_matrix(theta);
    return pmd_matrix(a.window_phase_out) * m_b_lab * inter_crystal_element(a) * m_a *
           pmd_matrix(a.window_phase_in);
}

JonesVector layered_propagate(const Arrangement& a, const JonesVector& input,
                              long n_layers) {
    a.validate();
    if (n_layers < 1) {
        throw InvalidInput("n_layers must be at least 1");
    }
    JonesVector v = pmd_matrix(a.window_phase_in) * input;
    {
        const JonesMatrix slab =
            partial_transmission(a.crystal_a, a.crystal_a.length / double(n_layers));
        for (long i = 0; i < n_layers; ++i) {
            v = slab * v;
        }
    }
    if (a.is_pair()) {
        v = inter_crystal_element(a) * v;
        const double theta = a.crystal_b_angle();
        v = rotation_matrix(theta) * v;
        const JonesMatrix slab =
            partial_transmission(*a.crystal_b, a.crystal_b->length / double(n_layers));
        for (long i = 0; i < n_layers; ++i) {
            v = slab * v;
        }
        v = rotation_matrix(-theta) * v;
    }
    return pmd_matrix(a.window_phase_out) * v;
}

std::vector<ProfileSample> propagation_profile(const Arrangement& a,
                                               const JonesVector& input,
                                               long n_samples) {
    a.validate();
    if (n_samples < 2) {
        throw InvalidInput("profile needs at least 2 samples");
    }
    const double len_a = a.crystal_a.length;
    const double len_total = a.total_length();
    const JonesMatrix w_in = pmd_matrix(a.window_phase_in);
    // Everything the field has passed once it is inside crystal B.
    const JonesMatrix upstream_of_b =
        inter_crystal_element(a) * transmission_matrix(a.crystal_a) * w_in;
    const double theta = a.is_pair() ? a.crystal_b_angle() : 0.0;

    std::vector<ProfileSample> out;
    out.reserve(size_t(n_samples));
    // Unwrap state: previous raw phase and accumulated phase, per component.
    double prev_arg[2] = {0.0, 0.0};
    double accum[2] = {0.0, 0.0};
    const double input_arg[2] = {std::arg(input(0)), std::arg(input(1))};
    bool have_prev[2] = {false, false};

    for (long j = 0; j < n_samples; ++j) {
        const double z = len_total * double(j) / double(n_samples - 1);
        JonesVector v;
        if (j == 0) {
            v = input;
        } else if (z <= len_a || !a.is_pair()) {
            const double za = std::min(z, len_a);
            v = partial_transmission(a.crystal_a, za) * w_in * input;
        } else {
            v = rotation_matrix(-theta) *
                partial_transmission(*a.crystal_b, z - len_a) *
                rotation_matrix(theta) * upstream_of_b * input;
        }
        if (j == n_samples - 1) {
            v = pmd_matrix(a.window_phase_out) * v;
        }

        ProfileSample s;
        s.z = z;
        s.intensity_d1 = std::norm(v(0));
        s.intensity_d2 = std::norm(v(1));
        for (int comp = 0; comp < 2; ++comp) {
            const double inten = (comp == 0) ? s.intensity_d1 : s.intensity_d2;
            if (inten > 1e-300) {
                const double raw = std::arg(v(comp));
                const double ref = have_prev[comp] ? prev_arg[comp] : input_arg[comp];
                double delta = raw - ref;
                delta -= 2.0 * kPi * std::round(delta / (2.0 * kPi));
                accum[comp] += delta;
                prev_arg[comp] = raw;
                have_prev[comp] = true;
            }
            // Dark component: hold the last accumulated phase.
            if (comp == 0) {
                s.phase_d1 = accum[0];
            } else {
                s.phase_d2 = accum[1];
            }
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace polqmem
