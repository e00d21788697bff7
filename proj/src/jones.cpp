#include "polqmem/jones.hpp"

#include <cmath>

#include "polqmem/errors.hpp"

namespace polqmem {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw InvalidInput(std::string(what) + " must be finite");
    }
}

}  // namespace

JonesMatrix rotation_matrix(double angle_rad) {
    require_finite(angle_rad, "rotation angle");
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    JonesMatrix r;
    r << c, -s, s, c;
    return r;
}

JonesMatrix pdl_matrix(double d1, double d2) {
    require_finite(d1, "optical depth d1");
    require_finite(d2, "optical depth d2");
    if (d1 < 0.0 || d2 < 0.0) {
        throw InvalidInput("optical depths must be nonnegative");
    }
    JonesMatrix t = JonesMatrix::Zero();
    t(0, 0) = std::exp(-0.5 * d1);
    t(1, 1) = std::exp(-0.5 * d2);
    return t;
}

JonesMatrix pmd_matrix(double biref_phase_rad) {
    require_finite(biref_phase_rad, "birefringent phase");
    JonesMatrix u = JonesMatrix::Zero();
    u(0, 0) = 1.0;
    u(1, 1) = std::polar(1.0, biref_phase_rad);
    return u;
}

TuFactors tu_decompose(const JonesMatrix& m) {
    Eigen::JacobiSVD<JonesMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector2d sv = svd.singularValues();
    if (!(sv(1) > sv(0) * 1e-14) || sv(0) <= 0.0) {
        throw DecompositionFailed("matrix is singular, no unique unitary factor");
    }
    // m = W S V^dag = (W S W^dag)(W V^dag) = t u.
    const JonesMatrix w = svd.matrixU();
    TuFactors f;
    f.t = w * sv.asDiagonal() * w.adjoint();
    f.u = w * svd.matrixV().adjoint();
    return f;
}

JonesVector apply(const JonesMatrix& m, const JonesVector& v) {
    return m * v;
}

StokesVector jones_to_stokes(const JonesVector& v) {
    const double i1 = std::norm(v(0));
    const double i2 = std::norm(v(1));
    const Complex cross = std::conj(v(0)) * v(1);
    StokesVector s;
    s.s0 = i1 + i2;
    s.s1 = i1 - i2;
    s.s2 = 2.0 * cross.real();
    s.s3 = 2.0 * cross.imag();
    return s;
}

JonesVector standard_state(StateLabel label) {
    const double isq2 = 1.0 / std::sqrt(2.0);
    JonesVector v;
    switch (label) {
        case StateLabel::H: v << 1.0, 0.0; break;
        case StateLabel::V: v << 0.0, 1.0; break;
        case StateLabel::D: v << isq2, isq2; break;
        case StateLabel::A: v << isq2, -isq2; break;
        case StateLabel::L: v << isq2, Complex(0.0, isq2); break;
        case StateLabel::R: v << isq2, Complex(0.0, -isq2); break;
        default: throw InvalidInput("unknown state label");
    }
    return v;
}

JonesVector named_state(std::string_view name) {
    if (name == "H") return standard_state(StateLabel::H);
    if (name == "V") return standard_state(StateLabel::V);
    if (name == "D" || name == "+") return standard_state(StateLabel::D);
    if (name == "A") return standard_state(StateLabel::A);
    if (name == "L") return standard_state(StateLabel::L);
    if (name == "R") return standard_state(StateLabel::R);
    if (name == "Q") return qwp_elliptical_state();
    throw InvalidInput("unknown state name: " + std::string(name));
}

JonesVector qwp_elliptical_state() {
    JonesVector v;
    v << Complex(0.5, 0.5 * std::sqrt(2.0)), Complex(0.5, 0.0);
    return v;
}

double intensity(const JonesVector& v) {
    return std::norm(v(0)) + std::norm(v(1));
}

bool is_normalized(const JonesVector& v, double tol) {
    return std::abs(intensity(v) - 1.0) <= tol;
}

bool is_unitary(const JonesMatrix& m, double tol) {
    return (m.adjoint() * m - JonesMatrix::Identity()).norm() <= tol;
}

bool is_pdl(const JonesMatrix& m, double tol) {
    if ((m - m.adjoint()).norm() > tol) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<JonesMatrix> es(m);
    const Eigen::Vector2d ev = es.eigenvalues();
    return ev(0) > tol && ev(1) <= 1.0 + tol;
}

Eigen::Vector3d stokes_direction(const JonesVector& v) {
    const StokesVector s = jones_to_stokes(v);
    Eigen::Vector3d dir(s.s1, s.s2, s.s3);
    const double n = dir.norm();
    if (!(n > 1e-300)) {
        throw InvalidInput("polarization direction undefined for zero state");
    }
    return dir / n;
}

}  // namespace polqmem
