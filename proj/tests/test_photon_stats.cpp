#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "polqmem/errors.hpp"
#include "polqmem/photon_stats.hpp"

using namespace polqmem;

namespace {

TmssSpec spec_with(double mean_n, int cutoff) {
    TmssSpec s;
    s.mean_n = mean_n;
    s.cutoff = cutoff;
    return s;
}

}  // namespace

TEST_CASE("photon number distribution is a normalized geometric tail") {
    const TmssSpec s = spec_with(0.25, 60);
    const auto p = photon_number_dist(s);
    REQUIRE(p.size() == 61);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    const double q = 0.25 / 1.25;
    for (std::size_t n = 1; n < p.size(); ++n) {
        CHECK(p[n] / p[n - 1] == doctest::Approx(q).epsilon(1e-12));
    }
    CHECK(p[0] > p[1]);

    SUBCASE("a dark source is rejected, not modeled") {
        CHECK_THROWS_AS(photon_number_dist(spec_with(0.0, 10)), InvalidInput);
    }
}

TEST_CASE("spec validation enforces the tail bound") {
    CHECK_THROWS_AS(spec_with(-0.1, 10).validate(), InvalidInput);
    CHECK_THROWS_AS(spec_with(0.25, -1).validate(), InvalidInput);
    // mu = 0.25: tail q^(n+1) with q = 0.2 drops below 1e-12 at n = 17.
    CHECK(oracles::thermal_tail_mass(0.25, 17) < kMaxTailMass);
    CHECK(oracles::thermal_tail_mass(0.25, 16) >= kMaxTailMass);
    CHECK_NOTHROW(spec_with(0.25, 17).validate());
    CHECK_THROWS_AS(spec_with(0.25, 16).validate(), CutoffTooSmall);
}

TEST_CASE("default cutoff is the smallest admissible one") {
    for (double mu : {0.05, 0.25, 1.0, 4.0}) {
        const TmssSpec s = TmssSpec::with_default_cutoff(mu);
        CHECK(oracles::thermal_tail_mass(mu, s.cutoff) < kMaxTailMass);
        if (s.cutoff > 0) {
            CHECK(oracles::thermal_tail_mass(mu, s.cutoff - 1) >= kMaxTailMass);
        }
    }
    // The cap sits between mu = 6 (needs 179) and mu = 7 (needs 206).
    CHECK_NOTHROW(TmssSpec::with_default_cutoff(6.0));
    CHECK_THROWS_AS(TmssSpec::with_default_cutoff(7.0), CutoffTooSmall);
}

TEST_CASE("correlation sums reproduce the thermal closed forms") {
    // Generous cutoffs: the tail of the third moment decays like
    // n^3 q^n, so a tail mass of 1e-12 still leaves ~1e-8 moment error.
    const std::pair<double, int> points[] = {
        {0.05, 40}, {0.25, 60}, {1.0, 120}, {4.0, 280}};
    for (const auto& [mu, cutoff] : points) {
        const TmssSpec s = spec_with(mu, cutoff);
        CHECK(cross_correlation(s) ==
              doctest::Approx(oracles::thermal_cross_correlation(mu)).epsilon(1e-9));
        CHECK(heralded_auto_correlation(s) ==
              doctest::Approx(oracles::thermal_heralded_auto(mu)).epsilon(1e-9));
        // The minimal admissible cutoff is still good to ~1e-7.
        const TmssSpec minimal = TmssSpec::with_default_cutoff(mu);
        CHECK(heralded_auto_correlation(minimal) ==
              doctest::Approx(oracles::thermal_heralded_auto(mu)).epsilon(1e-7));
    }
    SUBCASE("the benchmark point") {
        const TmssSpec s = spec_with(0.25, 60);
        CHECK(cross_correlation(s) == doctest::Approx(6.0).epsilon(1e-9));
        CHECK(heralded_auto_correlation(s) ==
              doctest::Approx(11.0 / 18.0).epsilon(1e-9));
    }
    SUBCASE("heralding beats the unheralded statistics at low mean number") {
        // Unheralded thermal light has g2 = 2; heralding pushes the
        // single-photon component far below that.
        for (double mu : {0.01, 0.1, 0.25, 0.5}) {
            const TmssSpec s = TmssSpec::with_default_cutoff(mu);
            CHECK(heralded_auto_correlation(s) < 1.0);
        }
        // The heralded value crosses 1 at mu = 1/sqrt(2).
        const double knee = 1.0 / std::sqrt(2.0);
        CHECK(heralded_auto_correlation(spec_with(knee, 150)) ==
              doctest::Approx(1.0).epsilon(1e-9));
        CHECK(heralded_auto_correlation(TmssSpec::with_default_cutoff(0.8)) > 1.0);
    }
}

TEST_CASE("cross correlation decreases with the mean photon number") {
    double prev = 1e300;
    for (double mu = 0.02; mu < 3.0; mu += 0.07) {
        const double g = cross_correlation(TmssSpec::with_default_cutoff(mu));
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("heralded bound from a measured cross correlation") {
    SUBCASE("the benchmark inversion") {
        CHECK(bound_from_cross(6.0) == doctest::Approx(11.0 / 18.0).epsilon(2e-3));
        CHECK(bound_from_cross(9.4) ==
              doctest::Approx(0.40289723856948845).epsilon(1e-6));
    }
    SUBCASE("round trip through the forward map") {
        for (double mu : {0.05, 0.25, 1.0, 3.0}) {
            const double g = oracles::thermal_cross_correlation(mu);
            CHECK(bound_from_cross(g) ==
                  doctest::Approx(oracles::thermal_heralded_auto(mu)).epsilon(1e-7));
        }
    }
    SUBCASE("monotone decreasing in the cross correlation") {
        double prev = 1e300;
        for (double g = 2.5; g < 60.0; g += 1.3) {
            const double b = bound_from_cross(g);
            CHECK(b < prev);
            prev = b;
        }
    }
    SUBCASE("strong correlations push the bound toward zero") {
        CHECK(bound_from_cross(2000.0) < 4.1e-3);
        CHECK(bound_from_cross(2000.0) > 0.0);
    }
    SUBCASE("the thermal floor is outside the model") {
        CHECK_THROWS_AS(bound_from_cross(2.0), OutOfModel);
        CHECK_THROWS_AS(bound_from_cross(1.2), OutOfModel);
        CHECK_NOTHROW(bound_from_cross(2.0 + 1e-4));
    }
}

TEST_CASE("nonclassicality witness is strict") {
    CHECK(nonclassicality_check(2.0 + 1e-9) == Nonclassicality::nonclassical);
    CHECK(nonclassicality_check(2.0) == Nonclassicality::classical_compatible);
    CHECK(nonclassicality_check(1.0) == Nonclassicality::classical_compatible);
    CHECK(nonclassicality_check(6.0) == Nonclassicality::nonclassical);
}
