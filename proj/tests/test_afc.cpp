#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "polqmem/afc.hpp"
#include "polqmem/errors.hpp"

using namespace polqmem;

namespace {

AfcSpec make_afc(double finesse, double c, Readout r = Readout::forward) {
    AfcSpec afc;
    afc.finesse = finesse;
    afc.decoherence_factor = c;
    afc.readout = r;
    return afc;
}

}  // namespace

TEST_CASE("afc spec validation") {
    CHECK_NOTHROW(make_afc(1.0, 0.0).validate());
    CHECK_NOTHROW(make_afc(10.0, 1.0).validate());
    CHECK_THROWS_AS(make_afc(0.9, 0.5).validate(), InvalidInput);
    CHECK_THROWS_AS(make_afc(2.0, -0.1).validate(), InvalidInput);
    CHECK_THROWS_AS(make_afc(2.0, 1.1).validate(), InvalidInput);
}

TEST_CASE("comb rescales the optical depth") {
    CHECK(comb_depth(2.70, make_afc(2.7, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(comb_depth(5.0, make_afc(1.0, 1.0)) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK_THROWS_AS(comb_depth(-1.0, make_afc(1.0, 1.0)), InvalidInput);
}

TEST_CASE("forward echo amplitude and efficiency") {
    CHECK(forward_echo_amplitude(0.0) == 0.0);
    CHECK(forward_echo_amplitude(2.0) == doctest::Approx(2.0 / M_E).epsilon(1e-14));

    SUBCASE("efficiency peaks at comb depth two with value 4/e^2") {
        const AfcSpec unit = make_afc(1.0, 1.0);
        const double argmax = oracles::golden_maximize(
            [&](double d) { return forward_efficiency(d, unit); }, 0.1, 6.0);
        CHECK(argmax == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(forward_efficiency(argmax, unit) ==
              doctest::Approx(0.5413411329464508).epsilon(1e-12));
        // Nothing beats the peak on a wide grid.
        for (int i = 0; i <= 200; ++i) {
            CHECK(forward_efficiency(0.05 * i, unit) <= 0.5413411329464508 + 1e-12);
        }
    }
    SUBCASE("decoherence scales the efficiency by its square") {
        const double full = forward_efficiency(1.3, make_afc(1.0, 1.0));
        const double damped = forward_efficiency(1.3, make_afc(1.0, 0.5));
        CHECK(damped == doctest::Approx(0.25 * full).epsilon(1e-14));
        CHECK(forward_efficiency(1.3, make_afc(1.0, 0.0)) == 0.0);
    }
}

TEST_CASE("backward recall beats forward recall at every depth") {
    for (int i = 1; i <= 160; ++i) {
        const double d = 0.05 * i;
        CHECK(backward_efficiency(d) >=
              forward_echo_amplitude(d) * forward_echo_amplitude(d) - 1e-15);
    }
    CHECK(backward_efficiency(50.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-crystal echo matrix matches the emission integral") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> depth(0.0, 5.0);
    std::uniform_real_distribution<double> phase(0.0, 4.0 * M_PI);
    std::uniform_real_distribution<double> len(0.005, 0.02);
    std::uniform_real_distribution<double> fin(1.0, 10.0);
    std::uniform_real_distribution<double> deco(0.3, 1.0);
    for (int i = 0; i < 100; ++i) {
        const CrystalSpec c = CrystalSpec::from_depths(depth(rng), depth(rng),
                                                       phase(rng), len(rng));
        const AfcSpec afc = make_afc(fin(rng), deco(rng));
        const JonesMatrix got = memory_matrix_single(c, afc);
        const JonesMatrix want = oracles::forward_echo_matrix(
            c.alpha1 / afc.finesse, c.alpha2 / afc.finesse, c.delta_n, c.length,
            c.wavelength, afc.decoherence_factor);
        CHECK((got - want).norm() < 1e-10);
    }
}

TEST_CASE("echo phase is the host phase, not the comb-scaled one") {
    const CrystalSpec c = CrystalSpec::from_depths(2.0, 1.0, 1.2);
    const JonesMatrix m = memory_matrix_single(c, make_afc(4.0, 1.0));
    CHECK(std::arg(m(1, 1)) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(std::abs(std::arg(m(0, 0))) < 1e-14);
}

TEST_CASE("single-crystal backward recall") {
    SUBCASE("zero walk-off matches the two-pass integral") {
        std::mt19937_64 rng(66);
        std::uniform_real_distribution<double> depth(0.0, 5.0);
        std::uniform_real_distribution<double> fin(1.0, 10.0);
        for (int i = 0; i < 50; ++i) {
            const CrystalSpec c =
                CrystalSpec::from_depths(depth(rng), depth(rng), 0.0);
            const AfcSpec afc = make_afc(fin(rng), 0.8, Readout::backward);
            const JonesMatrix got = memory_matrix_single(c, afc);
            const Complex want1 = 0.8 * oracles::backward_echo_component(
                                            c.alpha1 / afc.finesse, 0.0, c.length,
                                            c.wavelength);
            const Complex want2 = 0.8 * oracles::backward_echo_component(
                                            c.alpha2 / afc.finesse, 0.0, c.length,
                                            c.wavelength);
            CHECK(std::abs(got(0, 0) - want1) < 1e-10);
            CHECK(std::abs(got(1, 1) - want2) < 1e-10);
            CHECK(std::abs(got(0, 1)) == 0.0);
        }
    }
    SUBCASE("birefringent walk-off defeats the two-pass rephasing") {
        const CrystalSpec c = CrystalSpec::from_depths(2.0, 1.0, 0.5);
        CHECK_THROWS_AS(memory_matrix_single(c, make_afc(2.0, 1.0, Readout::backward)),
                        UnsupportedConfiguration);
    }
}

TEST_CASE("pair echo identity") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> depth(0.0, 5.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> fin(1.0, 10.0);
    std::uniform_real_distribution<double> deco(0.3, 1.0);

    SUBCASE("crossed pair re-emits every polarization with one scalar") {
        for (int i = 0; i < 1000; ++i) {
            const double d1 = depth(rng), d2 = depth(rng), ph = phase(rng);
            const AfcSpec afc = make_afc(fin(rng), deco(rng));
            const Arrangement arr = Arrangement::identical_pair(
                ArrangementKind::rotated_pair, CrystalSpec::from_depths(d1, d2, ph));
            const JonesMatrix m = memory_matrix_pair(arr, afc);
            const double dt = (d1 + d2) / afc.finesse;
            const Complex scalar = afc.decoherence_factor * dt * std::exp(-dt / 2.0) *
                                   std::exp(Complex(0.0, ph));
            CHECK(std::abs(m(0, 0) - scalar) < 1e-12);
            CHECK(std::abs(m(1, 1) - scalar) < 1e-12);
            CHECK(std::abs(m(0, 1)) < 1e-12);
            CHECK(std::abs(m(1, 0)) < 1e-12);
        }
    }
    SUBCASE("plate pair re-emits through the component swap") {
        for (int i = 0; i < 200; ++i) {
            const double d1 = depth(rng), d2 = depth(rng), ph = phase(rng);
            const AfcSpec afc = make_afc(fin(rng), deco(rng));
            const Arrangement arr = Arrangement::identical_pair(
                ArrangementKind::hwp_pair, CrystalSpec::from_depths(d1, d2, ph));
            const JonesMatrix m = memory_matrix_pair(arr, afc);
            const double dt = (d1 + d2) / afc.finesse;
            const double mag = afc.decoherence_factor * dt * std::exp(-dt / 2.0);
            CHECK(std::abs(std::abs(m(0, 1)) - mag) < 1e-12);
            CHECK(std::abs(std::abs(m(1, 0)) - mag) < 1e-12);
            CHECK(std::abs(m(0, 0)) < 1e-12);
            CHECK(std::abs(m(1, 1)) < 1e-12);
        }
    }
    SUBCASE("aligned pair keeps the polarization imbalance") {
        const AfcSpec afc = make_afc(2.0, 0.9);
        const Arrangement arr = Arrangement::identical_pair(
            ArrangementKind::aligned_pair, CrystalSpec::from_depths(1.35, 0.495, 0.7));
        const JonesMatrix m = memory_matrix_pair(arr, afc);
        // Two equal emission paths per axis: 2 c d~ e^{-d~} with d~ the
        // single-crystal comb depth of that axis.
        const double da = 1.35 / 2.0;
        const double db = 0.495 / 2.0;
        CHECK(std::abs(m(0, 0)) ==
              doctest::Approx(0.9 * 2.0 * da * std::exp(-da)).epsilon(1e-12));
        CHECK(std::abs(m(1, 1)) ==
              doctest::Approx(0.9 * 2.0 * db * std::exp(-db)).epsilon(1e-12));
        CHECK(std::arg(m(1, 1)) == doctest::Approx(2.0 * 0.7).epsilon(1e-12));
        CHECK(std::abs(m(0, 1)) == 0.0);
    }
    SUBCASE("windows wrap the forward pair echo") {
        Arrangement arr = Arrangement::identical_pair(
            ArrangementKind::rotated_pair, CrystalSpec::from_depths(1.0, 0.5, 0.3));
        const AfcSpec afc = make_afc(2.0, 1.0);
        const JonesMatrix bare = memory_matrix_pair(arr, afc);
        arr.window_phase_in = 0.2;
        arr.window_phase_out = 0.5;
        const JonesMatrix wrapped = memory_matrix_pair(arr, afc);
        const JonesMatrix want = pmd_matrix(0.5) * bare * pmd_matrix(0.2);
        CHECK((wrapped - want).norm() < 1e-13);
    }
    CHECK_THROWS_AS(
        memory_matrix_pair(
            Arrangement::single_crystal(CrystalSpec::from_depths(1, 1, 0)),
            make_afc(1.0, 1.0)),
        InvalidInput);
}

TEST_CASE("pair backward recall") {
    const AfcSpec afc = make_afc(3.0, 0.7, Readout::backward);

    SUBCASE("crossed pairing matches the trajectory sum") {
        const CrystalSpec a = CrystalSpec::from_depths(2.0, 0.4, 0.0, 0.012);
        const CrystalSpec b = CrystalSpec::from_depths(1.1, 0.9, 0.0, 0.008);
        const Arrangement arr =
            Arrangement::pair(ArrangementKind::rotated_pair, a, b);
        const JonesMatrix m = memory_matrix_pair(arr, afc);
        const double want1 =
            0.7 * oracles::backward_pair_component(a.alpha1 / 3.0, b.alpha2 / 3.0,
                                                   a.length, b.length);
        const double want2 =
            0.7 * oracles::backward_pair_component(a.alpha2 / 3.0, b.alpha1 / 3.0,
                                                   a.length, b.length);
        CHECK(std::abs(m(0, 0) - Complex(want1, 0.0)) < 1e-10);
        CHECK(std::abs(m(1, 1) - Complex(want2, 0.0)) < 1e-10);
        CHECK(std::abs(m(0, 1)) == 0.0);
    }
    SUBCASE("plate pair recalls without a swap and with crossed depths") {
        const CrystalSpec c = CrystalSpec::from_depths(1.35, 0.495, 0.0);
        const Arrangement plate =
            Arrangement::identical_pair(ArrangementKind::hwp_pair, c);
        const Arrangement rotated =
            Arrangement::identical_pair(ArrangementKind::rotated_pair, c);
        const JonesMatrix mp = memory_matrix_pair(plate, afc);
        const JonesMatrix mr = memory_matrix_pair(rotated, afc);
        CHECK((mp - mr).norm() < 1e-13);
        CHECK(std::abs(mp(0, 1)) == 0.0);
    }
    SUBCASE("aligned pairing doubles the same axis") {
        const CrystalSpec c = CrystalSpec::from_depths(1.35, 0.495, 0.0);
        const Arrangement arr =
            Arrangement::identical_pair(ArrangementKind::aligned_pair, c);
        const JonesMatrix m = memory_matrix_pair(arr, afc);
        CHECK(m(0, 0).real() ==
              doctest::Approx(0.7 * (1.0 - std::exp(-2.0 * 1.35 / 3.0)))
                  .epsilon(1e-12));
        CHECK(m(1, 1).real() ==
              doctest::Approx(0.7 * (1.0 - std::exp(-2.0 * 0.495 / 3.0)))
                  .epsilon(1e-12));
    }
    SUBCASE("the input window is crossed twice, the output window never") {
        const CrystalSpec c = CrystalSpec::from_depths(1.0, 0.5, 0.0);
        Arrangement arr = Arrangement::identical_pair(ArrangementKind::rotated_pair, c);
        const JonesMatrix bare = memory_matrix_pair(arr, afc);
        arr.window_phase_in = 0.3;
        arr.window_phase_out = 1.1;
        const JonesMatrix m = memory_matrix_pair(arr, afc);
        const JonesMatrix want = pmd_matrix(0.3) * bare * pmd_matrix(0.3);
        CHECK((m - want).norm() < 1e-13);
        arr.window_phase_out = 2.2;  // must not matter
        CHECK((memory_matrix_pair(arr, afc) - m).norm() == 0.0);
    }
    SUBCASE("unsupported backward configurations are refused") {
        const CrystalSpec with_phase = CrystalSpec::from_depths(1.0, 0.5, 0.4);
        CHECK_THROWS_AS(
            memory_matrix_pair(Arrangement::identical_pair(
                                   ArrangementKind::rotated_pair, with_phase),
                               afc),
            UnsupportedConfiguration);
        const CrystalSpec flat = CrystalSpec::from_depths(1.0, 0.5, 0.0);
        Arrangement plate =
            Arrangement::identical_pair(ArrangementKind::hwp_pair, flat);
        plate.hwp_retardance_error = 0.05;
        CHECK_THROWS_AS(memory_matrix_pair(plate, afc), UnsupportedConfiguration);
        Arrangement tilted =
            Arrangement::identical_pair(ArrangementKind::rotated_pair, flat);
        tilted.misalignment = 0.02;
        CHECK_THROWS_AS(memory_matrix_pair(tilted, afc), UnsupportedConfiguration);
    }
}

TEST_CASE("store and retrieve") {
    std::mt19937_64 rng(88);
    const AfcSpec afc = make_afc(3.165, 0.6475);

    SUBCASE("ideal crossed pair is polarization independent") {
        const Arrangement arr = Arrangement::pair_from_totals(
            ArrangementKind::rotated_pair, 2.70, 0.99, 1.9);
        double eff0 = -1.0;
        for (int i = 0; i < 100; ++i) {
            const JonesVector v = oracles::random_pure_state(rng);
            const MemoryResult r = store_and_retrieve(v, arr, afc);
            if (eff0 < 0.0) eff0 = r.efficiency;
            CHECK(std::abs(r.efficiency - eff0) < 1e-12);
            CHECK(stokes_direction(r.output_state).dot(stokes_direction(v)) >
                  1.0 - 1e-12);
            CHECK(r.efficiency + r.transmitted_leakage <= 1.0 + 1e-12);
        }
    }
    SUBCASE("plate pair returns the swapped state") {
        const Arrangement arr = Arrangement::pair_from_totals(
            ArrangementKind::hwp_pair, 2.70, 0.99, 0.8);
        for (int i = 0; i < 50; ++i) {
            const JonesVector v = oracles::random_pure_state(rng);
            JonesVector swapped;
            swapped << v(1), v(0);
            const MemoryResult r = store_and_retrieve(v, arr, afc);
            CHECK(std::abs(std::abs(swapped.dot(r.output_state)) - 1.0) < 1e-12);
        }
    }
    SUBCASE("single-crystal leakage is the comb-bleached transmission") {
        const Arrangement arr =
            Arrangement::single_crystal(CrystalSpec::from_depths(2.70, 0.99, 0.4));
        const JonesVector v = named_state("D");
        const MemoryResult r = store_and_retrieve(v, arr, afc);
        const double want = 0.5 * std::exp(-2.70 / 3.165) + 0.5 * std::exp(-0.99 / 3.165);
        CHECK(r.transmitted_leakage == doctest::Approx(want).epsilon(1e-12));
        const double e1 = forward_efficiency(comb_depth(2.70, afc), afc);
        const double e2 = forward_efficiency(comb_depth(0.99, afc), afc);
        CHECK(r.efficiency == doctest::Approx(0.5 * e1 + 0.5 * e2).epsilon(1e-12));
    }
    SUBCASE("efficiency plus leakage never exceeds one") {
        std::uniform_real_distribution<double> depth(0.0, 6.0);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
        std::uniform_real_distribution<double> fin(1.0, 8.0);
        for (int i = 0; i < 300; ++i) {
            const Arrangement arr = Arrangement::pair_from_totals(
                ArrangementKind::rotated_pair, depth(rng), depth(rng), phase(rng));
            const AfcSpec a = make_afc(fin(rng), 1.0);
            const MemoryResult r =
                store_and_retrieve(oracles::random_pure_state(rng), arr, a);
            CHECK(r.efficiency + r.transmitted_leakage <= 1.0 + 1e-12);
        }
    }
    SUBCASE("an empty memory returns nothing and leaks everything") {
        const Arrangement arr = Arrangement::pair_from_totals(
            ArrangementKind::rotated_pair, 0.0, 0.0, 0.0);
        const JonesVector v = named_state("L");
        const MemoryResult r = store_and_retrieve(v, arr, afc);
        CHECK(r.efficiency == 0.0);
        CHECK(r.transmitted_leakage == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((r.output_state - v).norm() < 1e-15);
    }
    SUBCASE("input must be normalized") {
        const Arrangement arr = Arrangement::pair_from_totals(
            ArrangementKind::rotated_pair, 1.0, 1.0, 0.0);
        CHECK_THROWS_AS(store_and_retrieve(2.0 * named_state("H"), arr, afc),
                        InvalidInput);
    }
    SUBCASE("backward readout through the pair") {
        const AfcSpec back = make_afc(3.165, 0.6475, Readout::backward);
        const Arrangement arr = Arrangement::pair_from_totals(
            ArrangementKind::rotated_pair, 2.70, 0.99, 0.0);
        const MemoryResult r = store_and_retrieve(named_state("D"), arr, back);
        const double depth_sum = (1.35 + 0.495) / 3.165;
        const double amp = 0.6475 * (1.0 - std::exp(-depth_sum));
        CHECK(r.efficiency == doctest::Approx(amp * amp).epsilon(1e-12));
        CHECK(stokes_direction(r.output_state)
                  .dot(stokes_direction(named_state("D"))) > 1.0 - 1e-12);
    }
}

TEST_CASE("decoherence factor solved from the observed efficiency band") {
    // With pair totals 2.70 / 0.99 and the comb tuned so the summed
    // comb depth a photon crosses lies in [0.8, 1.0] (total comb
    // bleaching 1.6-2.0), recall efficiencies between 7% and 9.5%
    // pin the decoherence amplitude to roughly one half.
    const auto solve_c = [](double eff, double crossing_depth) {
        return std::sqrt(eff) /
               (crossing_depth * std::exp(-crossing_depth / 2.0));
    };
    double lo = 1.0, hi = 0.0;
    for (double eff : {0.07, 0.095}) {
        for (double dt : {0.8, 1.0}) {
            const double c = solve_c(eff, dt);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
            // Consistency: feeding the solved c back through the pair
            // echo reproduces the efficiency.
            const AfcSpec afc = make_afc(1.845 / dt, c);
            const Arrangement arr = Arrangement::pair_from_totals(
                ArrangementKind::rotated_pair, 2.70, 0.99, 0.0);
            const MemoryResult r =
                store_and_retrieve(named_state("H"), arr, afc);
            CHECK(r.efficiency == doctest::Approx(eff).epsilon(1e-10));
        }
    }
    CHECK(lo > 0.42);
    CHECK(lo < 0.45);
    CHECK(hi > 0.55);
    CHECK(hi < 0.59);
}
