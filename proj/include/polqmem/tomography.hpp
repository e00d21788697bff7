#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "polqmem/errors.hpp"
#include "polqmem/jones.hpp"

namespace polqmem {

using DensityMatrix = Eigen::Matrix2cd;

// Throws InvalidInput unless m is Hermitian, positive semidefinite and
// unit trace, all within tol.
void validate_density_matrix(const DensityMatrix& m, double tol = 1e-9);

// |psi><psi| of a normalized state.
DensityMatrix pure_state_density(const JonesVector& psi);

// The three measurement settings, one per Poincare axis. Each setting
// splits the beam onto two detectors behind orthogonal projectors.
enum class Basis { Z, X, Y };  // Z: H/V, X: D/A, Y: L/R

struct ProjectorSetting {
    Basis basis = Basis::Z;
    JonesVector plus;
    JonesVector minus;
};

std::array<ProjectorSetting, 3> standard_settings();

const char* basis_name(Basis b);

// One tomography acquisition: six Poissonian detector counts in the
// fixed order Z+, Z-, X+, X-, Y+, Y-.
struct CountRecord {
    std::array<long long, 6> counts{};
    long long n_per_setting = 0;  // target photons per setting
    std::uint64_t seed = 0;

    long long& at(Basis b, bool plus_detector);
    long long at(Basis b, bool plus_detector) const;
    long long setting_total(Basis b) const;
    long long total() const;

    // Plain-text round-trip: two metadata lines then one line per
    // detector ("Z + 4980").
    std::string to_text() const;
    static CountRecord from_text(const std::string& text);
};

// Draws the six counts for a state rho: for each setting the expected
// detector intensity is n_per_setting * <p|rho|p>, and the count is a
// Poisson variate with that mean. Identical seeds give identical
// records.
CountRecord simulate_counts(const DensityMatrix& rho, long long n_per_setting,
                            std::uint64_t seed);

struct MleOptions {
    long max_iterations = 100000;
    // Converged when the simplex objective spread falls below
    // tolerance * max(1, |best|).
    double tolerance = 1e-12;
};

struct MleDiagnostics {
    long iterations = 0;
    bool converged = false;
    double objective = 0.0;
    // Best objective value after each iteration; nonincreasing.
    std::vector<double> best_objective_trace;
};

// The optimizer ran out of iterations. Carries the best iterate so the
// caller can inspect how far it got.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, const DensityMatrix& best,
                     double objective)
        : Error(what), best_iterate(best), best_objective(objective) {}

    DensityMatrix best_iterate;
    double best_objective = 0.0;
};

// Maximum-likelihood estimate of the density matrix behind a count
// record. The matrix is parametrized through a Cholesky-like factor, so
// every iterate is physical (Hermitian, positive, unit trace); the
// Poisson likelihood is maximized by Nelder-Mead started from the
// linear-inversion estimate. Throws DegenerateData when a setting has
// no counts at all, ConvergenceError on iteration exhaustion.
DensityMatrix mle_reconstruct(const CountRecord& counts,
                              const MleOptions& options = {},
                              MleDiagnostics* diagnostics = nullptr);

// <psi|rho|psi> for a normalized pure target. Linear in rho and
// independent of the global phase of psi.
double fidelity(const DensityMatrix& rho, const JonesVector& psi);

struct MonteCarloResult {
    double mean_fidelity = 0.0;
    double std_fidelity = 0.0;
    long failed_trials = 0;
};

// Parametric-bootstrap uncertainty: resamples every cell as
// Poisson(observed), reconstructs, and accumulates the fidelity against
// psi. Trials draw from seeds derived per trial, so the result does not
// depend on evaluation order. Trials whose reconstruction fails are
// counted and skipped. Requires trials >= 2.
MonteCarloResult monte_carlo_uncertainty(const CountRecord& counts,
                                         const JonesVector& psi, long trials,
                                         std::uint64_t seed);

enum class BoundVerdict { exceeds, not_exceeds };

// A memory that measures the state and re-prepares it reaches an
// average fidelity of at most 2/3; beating that strictly requires
// quantum storage.
inline constexpr double kClassicalFidelityBound = 2.0 / 3.0;

BoundVerdict classical_bound_check(double fidelity_value);

struct BoundReport {
    BoundVerdict verdict = BoundVerdict::not_exceeds;
    double margin_sigmas = 0.0;  // (F - 2/3) / sigma
};

BoundReport classical_bound_check(double fidelity_value, double sigma);

}  // namespace polqmem
