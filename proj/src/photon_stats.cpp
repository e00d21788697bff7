#include "polqmem/photon_stats.hpp"

#include <cmath>

#include "polqmem/errors.hpp"

namespace polqmem {

namespace {

// Required cutoff for a given tail budget, uncapped.
long cutoff_for_tail(double mean_n, double tail) {
    const double q = mean_n / (1.0 + mean_n);
    // Smallest N with q^(N+1) < tail, i.e. N > log(tail)/log(q) - 1.
    long n = long(std::floor(std::log(tail) / std::log(q) - 1.0)) + 1;
    if (n < 1) {
        n = 1;
    }
    while (std::pow(q, double(n) + 1.0) >= tail) {
        ++n;
    }
    return n;
}

// Streaming moments of the truncated renormalized distribution.
struct Moments {
    double m1 = 0.0;  // <n>
    double m2 = 0.0;  // <n^2>
    double m3 = 0.0;  // <n^3>
};

Moments thermal_moments(const TmssSpec& s) {
    s.validate();
    const double q = s.mean_n / (1.0 + s.mean_n);
    double p = 1.0 / (1.0 + s.mean_n);
    double norm = 0.0;
    Moments m;
    for (int n = 0; n <= s.cutoff; ++n) {
        const double dn = double(n);
        norm += p;
        m.m1 += dn * p;
        m.m2 += dn * dn * p;
        m.m3 += dn * dn * dn * p;
        p *= q;
    }
    m.m1 /= norm;
    m.m2 /= norm;
    m.m3 /= norm;
    return m;
}

// Internal ceiling for the inversion in bound_from_cross. Keeps the
// brute-force sums bounded; reached only for g2_si within ~1e-5 of the
// thermal floor, where mean_n exceeds ~1e5.
constexpr long kInversionCutoffCap = 2000000;

}  // namespace

TmssSpec TmssSpec::with_default_cutoff(double mean_n) {
    if (!(mean_n > 0.0) || !std::isfinite(mean_n)) {
        throw InvalidInput("mean photon number must be positive");
    }
    TmssSpec s;
    s.mean_n = mean_n;
    const long needed = cutoff_for_tail(mean_n, kMaxTailMass);
    if (needed > kDefaultCutoffCap) {
        throw CutoffTooSmall(
            "default cutoff cap leaves too much tail mass at this mean photon "
            "number; pass an explicit cutoff");
    }
    s.cutoff = int(needed);
    return s;
}

void TmssSpec::validate() const {
    if (!(mean_n > 0.0) || !std::isfinite(mean_n)) {
        throw InvalidInput("mean photon number must be positive");
    }
    if (cutoff < 1) {
        throw InvalidInput("cutoff must be at least 1");
    }
    const double q = mean_n / (1.0 + mean_n);
    if (std::pow(q, double(cutoff) + 1.0) >= kMaxTailMass) {
        throw CutoffTooSmall("truncation tail mass exceeds the allowed budget");
    }
}

std::vector<double> photon_number_dist(const TmssSpec& s) {
    s.validate();
    const double q = s.mean_n / (1.0 + s.mean_n);
    std::vector<double> dist(size_t(s.cutoff) + 1);
    double p = 1.0 / (1.0 + s.mean_n);
    double norm = 0.0;
    for (int n = 0; n <= s.cutoff; ++n) {
        dist[size_t(n)] = p;
        norm += p;
        p *= q;
    }
    for (double& x : dist) {
        x /= norm;
    }
    return dist;
}

double cross_correlation(const TmssSpec& s) {
    const Moments m = thermal_moments(s);
    return m.m2 / (m.m1 * m.m1);
}

double heralded_auto_correlation(const TmssSpec& s) {
    const Moments m = thermal_moments(s);
    // Heralded weights n*P(n): <n(n-1)>' = (m3 - m2)/m1, <n>' = m2/m1.
    const double mean_heralded = m.m2 / m.m1;
    const double pairs_heralded = (m.m3 - m.m2) / m.m1;
    return pairs_heralded / (mean_heralded * mean_heralded);
}

double bound_from_cross(double g2_si) {
    if (!std::isfinite(g2_si)) {
        throw InvalidInput("cross-correlation must be finite");
    }
    if (g2_si <= 2.0) {
        throw OutOfModel(
            "cross-correlation at or below the thermal floor of 2 admits no "
            "mean photon number");
    }
    auto eval = [](double mean_n) {
        TmssSpec s;
        s.mean_n = mean_n;
        const long needed = cutoff_for_tail(mean_n, kMaxTailMass);
        if (needed > kInversionCutoffCap) {
            throw CutoffTooSmall(
                "cross-correlation too close to the thermal floor to invert");
        }
        s.cutoff = int(needed);
        return s;
    };
    // 2 + 1/mean_n brackets: excess = g2_si - 2 lies between
    // 0.5/hi and 2/lo by construction.
    const double excess = g2_si - 2.0;
    double lo = 0.5 / excess;
    double hi = 2.0 / excess;
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cross_correlation(eval(mid)) > g2_si) {
            lo = mid;  // small mean_n raises g2_si
        } else {
            hi = mid;
        }
    }
    return heralded_auto_correlation(eval(0.5 * (lo + hi)));
}

Nonclassicality nonclassicality_check(double g2_si) {
    if (!(g2_si >= 0.0)) {
        throw InvalidInput("cross-correlation must be nonnegative");
    }
    return g2_si > 2.0 ? Nonclassicality::nonclassical
                       : Nonclassicality::classical_compatible;
}

}  // namespace polqmem
