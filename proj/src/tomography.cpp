#include "polqmem/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "polqmem/seeding.hpp"

namespace polqmem {

namespace {

// Detection probabilities (p_plus) for the three settings, read off the
// density matrix directly.
std::array<double, 3> plus_probabilities(const DensityMatrix& rho) {
    const double s1 = std::real(rho(0, 0) - rho(1, 1));
    const double s2 = 2.0 * std::real(rho(1, 0));
    const double s3 = 2.0 * std::imag(rho(1, 0));
    return {0.5 * (1.0 + s1), 0.5 * (1.0 + s2), 0.5 * (1.0 + s3)};
}

// rho from the Cholesky-like parametrization G = [[t0, 0], [t2+i*t3, t1]],
// rho = G^dag G / tr(G^dag G). Any real parameter vector maps to a
// physical state.
DensityMatrix rho_from_params(const std::array<double, 4>& t) {
    const Complex c(t[2], t[3]);
    DensityMatrix rho;
    rho(0, 0) = t[0] * t[0] + std::norm(c);
    rho(1, 1) = t[1] * t[1];
    rho(0, 1) = std::conj(c) * t[1];
    rho(1, 0) = c * t[1];
    const double tr = std::real(rho(0, 0) + rho(1, 1));
    if (!(tr > 0.0)) {
        // Zero parameter vector: fall back to the maximally mixed state.
        return 0.5 * DensityMatrix::Identity();
    }
    return rho / tr;
}

// Inverse of rho_from_params for a strictly positive rho.
std::array<double, 4> params_from_rho(const DensityMatrix& rho) {
    const double r11 = std::real(rho(1, 1));
    const double b = std::sqrt(std::max(r11, 1e-12));
    const Complex c = rho(1, 0) / b;
    const double a2 = std::real(rho(0, 0)) - std::norm(c);
    const double a = std::sqrt(std::max(a2, 1e-12));
    return {a, b, c.real(), c.imag()};
}

struct NllContext {
    std::array<double, 6> k;   // observed counts
    std::array<double, 3> intensity;  // per-setting totals
};

// Poisson negative log-likelihood (constants dropped) plus a gauge term
// pinning the free overall scale of the parametrization.
double negative_log_likelihood(const NllContext& ctx,
                               const std::array<double, 4>& t) {
    const DensityMatrix rho = rho_from_params(t);
    const std::array<double, 3> plus = plus_probabilities(rho);
    double nll = 0.0;
    for (int s = 0; s < 3; ++s) {
        const double p_plus = std::clamp(plus[size_t(s)], 1e-15, 1.0);
        const double p_minus = std::clamp(1.0 - plus[size_t(s)], 1e-15, 1.0);
        const double mu_plus = ctx.intensity[size_t(s)] * p_plus;
        const double mu_minus = ctx.intensity[size_t(s)] * p_minus;
        nll += mu_plus + mu_minus;
        nll -= ctx.k[size_t(2 * s)] * std::log(mu_plus);
        nll -= ctx.k[size_t(2 * s + 1)] * std::log(mu_minus);
    }
    const double scale = t[0] * t[0] + t[1] * t[1] + t[2] * t[2] + t[3] * t[3];
    const double gauge = scale - 1.0;
    return nll + gauge * gauge;
}

// Linear-inversion estimate clamped onto the physical set, used as the
// optimizer's starting point.
DensityMatrix linear_inversion_start(const CountRecord& counts) {
    double s[3];
    for (int i = 0; i < 3; ++i) {
        const Basis b = Basis(i);
        const double tot = double(counts.setting_total(b));
        s[i] = (double(counts.at(b, true)) - double(counts.at(b, false))) / tot;
    }
    DensityMatrix rho;
    rho(0, 0) = 0.5 * (1.0 + s[0]);
    rho(1, 1) = 0.5 * (1.0 - s[0]);
    rho(0, 1) = 0.5 * Complex(s[1], -s[2]);
    rho(1, 0) = 0.5 * Complex(s[1], s[2]);
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(rho);
    Eigen::Vector2d ev = es.eigenvalues();
    ev(0) = std::max(ev(0), 1e-6);
    ev(1) = std::max(ev(1), 1e-6);
    DensityMatrix clamped = es.eigenvectors() * ev.asDiagonal() *
                            es.eigenvectors().adjoint();
    return clamped / std::real(clamped.trace());
}

}  // namespace

void validate_density_matrix(const DensityMatrix& m, double tol) {
    if ((m - m.adjoint()).norm() > tol) {
        throw InvalidInput("density matrix must be Hermitian");
    }
    if (std::abs(std::real(m.trace()) - 1.0) > tol) {
        throw InvalidInput("density matrix must have unit trace");
    }
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(m);
    if (es.eigenvalues()(0) < -tol) {
        throw InvalidInput("density matrix must be positive semidefinite");
    }
}

DensityMatrix pure_state_density(const JonesVector& psi) {
    if (!is_normalized(psi, 1e-9)) {
        throw InvalidInput("state must be normalized");
    }
    return psi * psi.adjoint();
}

std::array<ProjectorSetting, 3> standard_settings() {
    return {ProjectorSetting{Basis::Z, standard_state(StateLabel::H),
                             standard_state(StateLabel::V)},
            ProjectorSetting{Basis::X, standard_state(StateLabel::D),
                             standard_state(StateLabel::A)},
            ProjectorSetting{Basis::Y, standard_state(StateLabel::L),
                             standard_state(StateLabel::R)}};
}

const char* basis_name(Basis b) {
    switch (b) {
        case Basis::Z: return "Z";
        case Basis::X: return "X";
        case Basis::Y: return "Y";
    }
    return "?";
}

long long& CountRecord::at(Basis b, bool plus_detector) {
    return counts[size_t(2 * int(b) + (plus_detector ? 0 : 1))];
}

long long CountRecord::at(Basis b, bool plus_detector) const {
    return counts[size_t(2 * int(b) + (plus_detector ? 0 : 1))];
}

long long CountRecord::setting_total(Basis b) const {
    return at(b, true) + at(b, false);
}

long long CountRecord::total() const {
    long long t = 0;
    for (long long c : counts) {
        t += c;
    }
    return t;
}

std::string CountRecord::to_text() const {
    std::ostringstream out;
    out << "# n_per_setting = " << n_per_setting << "\n";
    out << "# seed = " << seed << "\n";
    for (int s = 0; s < 3; ++s) {
        for (int d = 0; d < 2; ++d) {
            out << basis_name(Basis(s)) << " " << (d == 0 ? "+" : "-") << " "
                << counts[size_t(2 * s + d)] << "\n";
        }
    }
    return out.str();
}

CountRecord CountRecord::from_text(const std::string& text) {
    CountRecord rec;
    std::array<bool, 6> seen{};
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        if (line[first] == '#') {
            std::istringstream meta(line.substr(first + 1));
            std::string key, eq;
            if (meta >> key >> eq && eq == "=") {
                if (key == "n_per_setting") {
                    meta >> rec.n_per_setting;
                } else if (key == "seed") {
                    meta >> rec.seed;
                }
            }
            continue;
        }
        std::istringstream row(line);
        std::string basis, detector;
        long long value = 0;
        if (!(row >> basis >> detector >> value) ||
            (detector != "+" && detector != "-")) {
            throw InvalidInput("count record line " + std::to_string(lineno) +
                               " is not 'basis detector count'");
        }
        int s;
        if (basis == "Z") {
            s = 0;
        } else if (basis == "X") {
            s = 1;
        } else if (basis == "Y") {
            s = 2;
        } else {
            throw InvalidInput("count record line " + std::to_string(lineno) +
                               " names unknown basis " + basis);
        }
        if (value < 0) {
            throw InvalidInput("count record line " + std::to_string(lineno) +
                               " carries a negative count");
        }
        const size_t idx = size_t(2 * s + (detector == "+" ? 0 : 1));
        if (seen[idx]) {
            throw InvalidInput("count record line " + std::to_string(lineno) +
                               " repeats a detector");
        }
        seen[idx] = true;
        rec.counts[idx] = value;
    }
    for (bool got : seen) {
        if (!got) {
            throw InvalidInput("count record is missing detector rows");
        }
    }
    return rec;
}

CountRecord simulate_counts(const DensityMatrix& rho, long long n_per_setting,
                            std::uint64_t seed) {
    validate_density_matrix(rho);
    if (n_per_setting < 1) {
        throw InvalidInput("n_per_setting must be positive");
    }
    const std::array<double, 3> plus = plus_probabilities(rho);
    std::mt19937_64 rng(seed);
    CountRecord rec;
    rec.n_per_setting = n_per_setting;
    rec.seed = seed;
    for (int s = 0; s < 3; ++s) {
        const double pp = std::clamp(plus[size_t(s)], 0.0, 1.0);
        const double means[2] = {double(n_per_setting) * pp,
                                 double(n_per_setting) * (1.0 - pp)};
        for (int d = 0; d < 2; ++d) {
            long long k = 0;
            if (means[d] > 0.0) {
                std::poisson_distribution<long long> poisson(means[d]);
                k = poisson(rng);
            }
            rec.counts[size_t(2 * s + d)] = k;
        }
    }
    return rec;
}

DensityMatrix mle_reconstruct(const CountRecord& counts,
                              const MleOptions& options,
                              MleDiagnostics* diagnostics) {
    if (counts.total() == 0) {
        throw DegenerateData("all counts are zero");
    }
    NllContext ctx;
    for (int s = 0; s < 3; ++s) {
        const long long tot = counts.setting_total(Basis(s));
        if (tot == 0) {
            throw DegenerateData(std::string("setting ") +
                                 basis_name(Basis(s)) + " has no counts");
        }
        ctx.intensity[size_t(s)] = double(tot);
        ctx.k[size_t(2 * s)] = double(counts.at(Basis(s), true));
        ctx.k[size_t(2 * s + 1)] = double(counts.at(Basis(s), false));
    }

    using Params = std::array<double, 4>;
    const auto f = [&ctx](const Params& t) {
        return negative_log_likelihood(ctx, t);
    };

    // Initial simplex around the linear-inversion estimate.
    const Params start = params_from_rho(linear_inversion_start(counts));
    std::array<Params, 5> simplex;
    std::array<double, 5> value;
    simplex[0] = start;
    for (int i = 1; i < 5; ++i) {
        simplex[size_t(i)] = start;
        simplex[size_t(i)][size_t(i - 1)] += 0.05;
    }
    for (int i = 0; i < 5; ++i) {
        value[size_t(i)] = f(simplex[size_t(i)]);
    }

    const auto order = [&] {
        std::array<int, 5> idx{0, 1, 2, 3, 4};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return value[size_t(a)] < value[size_t(b)];
        });
        return idx;
    };

    MleDiagnostics local;
    MleDiagnostics& diag = diagnostics ? *diagnostics : local;
    diag = MleDiagnostics{};

    long it = 0;
    for (; it < options.max_iterations; ++it) {
        const std::array<int, 5> idx = order();
        const double best = value[size_t(idx[0])];
        const double worst = value[size_t(idx[4])];
        diag.best_objective_trace.push_back(best);
        if (worst - best <= options.tolerance * std::max(1.0, std::abs(best))) {
            diag.converged = true;
            break;
        }

        Params centroid{};
        for (int i = 0; i < 4; ++i) {
            for (int d = 0; d < 4; ++d) {
                centroid[size_t(d)] += simplex[size_t(idx[size_t(i)])][size_t(d)] / 4.0;
            }
        }
        const auto blend = [&centroid](const Params& p, double coef) {
            Params q;
            for (int d = 0; d < 4; ++d) {
                q[size_t(d)] = centroid[size_t(d)] +
                               coef * (p[size_t(d)] - centroid[size_t(d)]);
            }
            return q;
        };

        const Params& worst_pt = simplex[size_t(idx[4])];
        const Params reflected = blend(worst_pt, -1.0);
        const double fr = f(reflected);
        if (fr < value[size_t(idx[0])]) {
            const Params expanded = blend(worst_pt, -2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[size_t(idx[4])] = expanded;
                value[size_t(idx[4])] = fe;
            } else {
                simplex[size_t(idx[4])] = reflected;
                value[size_t(idx[4])] = fr;
            }
            continue;
        }
        if (fr < value[size_t(idx[3])]) {
            simplex[size_t(idx[4])] = reflected;
            value[size_t(idx[4])] = fr;
            continue;
        }
        const Params contracted = blend(worst_pt, 0.5);
        const double fc = f(contracted);
        if (fc < value[size_t(idx[4])]) {
            simplex[size_t(idx[4])] = contracted;
            value[size_t(idx[4])] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        for (int i = 1; i < 5; ++i) {
            for (int d = 0; d < 4; ++d) {
                simplex[size_t(idx[size_t(i)])][size_t(d)] =
                    0.5 * (simplex[size_t(idx[size_t(i)])][size_t(d)] +
                           simplex[size_t(idx[0])][size_t(d)]);
            }
            value[size_t(idx[size_t(i)])] = f(simplex[size_t(idx[size_t(i)])]);
        }
    }

    const std::array<int, 5> idx = order();
    diag.iterations = it;
    diag.objective = value[size_t(idx[0])];
    const DensityMatrix best_rho = rho_from_params(simplex[size_t(idx[0])]);
    if (!diag.converged) {
        throw ConvergenceError("likelihood maximization exhausted its iterations",
                               best_rho, diag.objective);
    }
    return best_rho;
}

double fidelity(const DensityMatrix& rho, const JonesVector& psi) {
    if (!is_normalized(psi, 1e-9)) {
        throw InvalidInput("target state must be normalized");
    }
    const double f = std::real((psi.adjoint() * rho * psi)(0, 0));
    return std::clamp(f, 0.0, 1.0);
}

MonteCarloResult monte_carlo_uncertainty(const CountRecord& counts,
                                         const JonesVector& psi, long trials,
                                         std::uint64_t seed) {
    if (trials < 2) {
        throw InvalidInput("uncertainty estimation needs at least 2 trials");
    }
    MonteCarloResult result;
    double sum = 0.0;
    double sumsq = 0.0;
    long good = 0;
    for (long t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = derive_stream_seed(seed, std::uint64_t(t));
        std::mt19937_64 rng(trial_seed);
        CountRecord resampled = counts;
        for (size_t i = 0; i < resampled.counts.size(); ++i) {
            const long long observed = counts.counts[i];
            if (observed > 0) {
                std::poisson_distribution<long long> poisson{double(observed)};
                resampled.counts[i] = poisson(rng);
            }
        }
        try {
            const DensityMatrix rho = mle_reconstruct(resampled);
            const double fid = fidelity(rho, psi);
            sum += fid;
            sumsq += fid * fid;
            ++good;
        } catch (const Error&) {
            ++result.failed_trials;
        }
    }
    if (good < 2) {
        throw DegenerateData("too few successful bootstrap trials");
    }
    result.mean_fidelity = sum / double(good);
    const double var =
        (sumsq - sum * sum / double(good)) / double(good - 1);
    result.std_fidelity = std::sqrt(std::max(var, 0.0));
    return result;
}

BoundVerdict classical_bound_check(double fidelity_value) {
    if (!(fidelity_value >= 0.0) || !(fidelity_value <= 1.0)) {
        throw InvalidInput("fidelity must lie in [0, 1]");
    }
    return fidelity_value > kClassicalFidelityBound ? BoundVerdict::exceeds
                                                    : BoundVerdict::not_exceeds;
}

BoundReport classical_bound_check(double fidelity_value, double sigma) {
    BoundReport report;
    report.verdict = classical_bound_check(fidelity_value);
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw InvalidInput("sigma must be nonnegative");
    }
    if (sigma > 0.0) {
        report.margin_sigmas = (fidelity_value - kClassicalFidelityBound) / sigma;
    } else {
        report.margin_sigmas =
            fidelity_value > kClassicalFidelityBound
                ? std::numeric_limits<double>::infinity()
                : -std::numeric_limits<double>::infinity();
    }
    return report;
}

}  // namespace polqmem
