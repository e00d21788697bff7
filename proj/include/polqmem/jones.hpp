#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace polqmem {

using Complex = std::complex<double>;

// Two-component Jones vector. Components are the field amplitudes along
// the two principal axes of the storage medium, (D1, D2). Axis D1 is
// taken parallel to the laboratory H direction, so in an empty beamline
// the basis is simply (H, V).
using JonesVector = Eigen::Vector2cd;

// 2x2 complex transfer matrix acting on Jones vectors.
using JonesMatrix = Eigen::Matrix2cd;

// Stokes parameters (s0 = total intensity). For a normalized pure state
// s1^2 + s2^2 + s3^2 = s0^2 = 1.
struct StokesVector {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
};

// Default tolerance for algebraic identity checks.
inline constexpr double kAlgebraTol = 1e-12;

// Tolerance for factorization round-trips.
inline constexpr double kDecompositionTol = 1e-10;

// Rotation of the polarization plane by angle_rad (counterclockwise):
//   [ cos -sin ]
//   [ sin  cos ]
// Throws InvalidInput for non-finite angles.
JonesMatrix rotation_matrix(double angle_rad);

// Anisotropic absorber: diag(exp(-d1/2), exp(-d2/2)) for optical depths
// d1, d2 >= 0 along D1, D2. Throws InvalidInput for negative or
// non-finite depths.
JonesMatrix pdl_matrix(double d1, double d2);

// Birefringent phase element: diag(1, exp(i*phase)). The phase is
// referenced to D1, i.e. D1 accumulates no phase. Throws InvalidInput
// for non-finite phase.
JonesMatrix pmd_matrix(double biref_phase_rad);

// Polar factors of a transfer matrix m = t * u with t Hermitian
// positive semidefinite (losses) and u unitary (phases).
struct TuFactors {
    JonesMatrix t;
    JonesMatrix u;
};

// Polar decomposition via SVD. Throws DecompositionFailed when m is
// singular (a unitary factor is then not unique).
TuFactors tu_decompose(const JonesMatrix& m);

// m * v. Kept as a named operation so call sites read as physics.
JonesVector apply(const JonesMatrix& m, const JonesVector& v);

// Stokes parameters of a (not necessarily normalized) Jones vector:
//   s0 = |a1|^2 + |a2|^2, s1 = |a1|^2 - |a2|^2,
//   s2 = 2 Re(conj(a1) a2), s3 = 2 Im(conj(a1) a2).
StokesVector jones_to_stokes(const JonesVector& v);

// The six cardinal polarization states.
enum class StateLabel { H, V, D, A, L, R };

// H=(1,0), V=(0,1), D=(1,1)/sqrt2, A=(1,-1)/sqrt2,
// L=(1,i)/sqrt2, R=(1,-i)/sqrt2.
JonesVector standard_state(StateLabel label);

// Accepts "H", "V", "D", "+" (alias of D), "A", "L", "R", and "Q" for
// the elliptical probe state below. Throws InvalidInput otherwise.
JonesVector named_state(std::string_view name);

// Elliptical probe state ((1 + i sqrt2)/2, 1/2), the output of a
// quarter-wave plate illuminated with H at a suitable orientation.
JonesVector qwp_elliptical_state();

double intensity(const JonesVector& v);

bool is_normalized(const JonesVector& v, double tol = kAlgebraTol);
bool is_unitary(const JonesMatrix& m, double tol = kAlgebraTol);

// Hermitian positive semidefinite with eigenvalues in (0, 1]: a purely
// absorptive (gain-free, invertible) element.
bool is_pdl(const JonesMatrix& m, double tol = kAlgebraTol);

// Unit Poincare-sphere direction (s1, s2, s3)/|s| of a nonzero state.
// Throws InvalidInput on (numerically) zero input.
Eigen::Vector3d stokes_direction(const JonesVector& v);

}  // namespace polqmem
