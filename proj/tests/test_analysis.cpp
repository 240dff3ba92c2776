#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phaseslip/analysis.hpp"

using namespace phaseslip;
using std::numbers::pi;

TEST_CASE("double well at phi_e = 2pi, headline parameters") {
    CircuitParams p;
    const auto rep = find_wells(p, 2.0 * pi);
    REQUIRE(rep.minima.size() == 2);
    REQUIRE(rep.has_double_well());
    // Frozen from an independent root finder on dU/dphi.
    CHECK(rep.minima[0].phi == doctest::Approx(1.6635772488).epsilon(1e-8));
    CHECK(rep.minima[1].phi == doctest::Approx(10.9027933655).epsilon(1e-8));
    CHECK(rep.separation == doctest::Approx(9.2392161167).epsilon(1e-8));
    CHECK(rep.separation / pi == doctest::Approx(2.9409338).epsilon(1e-6));
    // The barrier top sits exactly at the bias point by symmetry.
    CHECK(rep.barrier_top->phi == doctest::Approx(2.0 * pi).epsilon(1e-8));
    CHECK(rep.barrier_top->energy == doctest::Approx(25.0).epsilon(1e-8));
    CHECK(rep.barrier_height == doctest::Approx(20.4980913669).epsilon(1e-8));
    CHECK(rep.minima[0].energy == doctest::Approx(4.5019086331).epsilon(1e-8));
}

TEST_CASE("single well at phi_e = 0") {
    CircuitParams p;
    const auto rep = find_wells(p, 0.0);
    REQUIRE(rep.minima.size() == 1);
    CHECK(rep.minima[0].phi == doctest::Approx(0.0).epsilon(1e-10));
    CHECK_FALSE(rep.has_double_well());
    CHECK_THROWS_AS(rep.require_double_well(), NoDoubleWellError);
}

TEST_CASE("weak-inductance limit: separation approaches 4pi") {
    CircuitParams p;
    p.e_l = 1e-4;
    const auto rep = find_wells(p, 2.0 * pi);
    REQUIRE(rep.has_double_well());
    CHECK(rep.separation == doctest::Approx(4.0 * pi).epsilon(1e-3));
}

TEST_CASE("separation shrinks monotonically with inductive energy") {
    // The double well requires E_L < E_m/8 (the barrier curvature at 2pi
    // changes sign there), so the sweep stays below 3.125.
    CircuitParams p;
    double prev = 1e30;
    for (double el : {0.25, 0.5, 1.0, 2.0, 3.0}) {
        p.e_l = el;
        const auto rep = find_wells(p, 2.0 * pi);
        REQUIRE(rep.has_double_well());
        CHECK(rep.separation < prev);
        prev = rep.separation;
    }
}

TEST_CASE("conventional junction pins a single well at phi_e = 2pi") {
    CircuitParams p;
    p.mode = JunctionMode::trivial_tunneling;
    const auto rep = find_wells(p, 2.0 * pi);
    // All local minima of the tilted cosine lie within ~1 rad of multiples of
    // 2pi; the two deepest straddle the bias only ~2pi apart at most, so the
    // 4pi-scale double well never forms. Here E_J < 2 E_L: a single minimum.
    REQUIRE(rep.minima.size() == 1);
    CHECK(rep.minima[0].phi == doctest::Approx(2.0 * pi).epsilon(1e-8));
}

TEST_CASE("anticrossing gap is exactly 2 epsilon") {
    CircuitParams p;
    for (int k : {-1, 0, 1, 3})
        CHECK(anticrossing_gap(p, k) == doctest::Approx(2.0 * p.epsilon).epsilon(1e-12));
    p.epsilon = 0.5;
    CHECK(anticrossing_gap(p, 0) == doctest::Approx(1.0).epsilon(1e-12));
    p.epsilon = 0.0;
    CHECK(std::abs(anticrossing_gap(p, 0)) < 1e-12);
}

TEST_CASE("parity transfer estimates at phi = pi/2") {
    CircuitParams p; // epsilon/e_m = 1e-3
    const double bias = p.e_m * std::cos(pi / 4.0);
    const double amp = p.epsilon / std::sqrt(p.epsilon * p.epsilon + bias * bias);
    CHECK(parity_transfer_amplitude(pi / 2.0, p) == doctest::Approx(amp).epsilon(1e-12));
    CHECK(parity_transfer_amplitude(pi / 2.0, p) == doctest::Approx(1.414e-3).epsilon(1e-3));
    const double rabi = p.epsilon * p.epsilon / (p.epsilon * p.epsilon + bias * bias);
    CHECK(parity_transfer_rabi(pi / 2.0, p) == doctest::Approx(rabi).epsilon(1e-12));
    CHECK(parity_transfer_rabi(pi / 2.0, p) == doctest::Approx(2.0e-6).epsilon(1e-3));
}

TEST_CASE("parity transfer saturates at the degeneracy point") {
    CircuitParams p;
    CHECK(parity_transfer_amplitude(pi, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(parity_transfer_rabi(pi, p) == doctest::Approx(1.0).epsilon(1e-12));
    // An exact degeneracy (both coupling and bias identically zero) is
    // undefined. cos(pi/2) is not exactly zero in floating point, so force
    // the bias to zero through e_m instead.
    p.epsilon = 0.0;
    p.e_m = 0.0;
    p.transparency = 0.0;
    CHECK_THROWS_AS(parity_transfer_amplitude(pi, p), DegeneracyError);
    CHECK_THROWS_AS(parity_transfer_rabi(pi, p), DegeneracyError);
    p = CircuitParams{};
    p.epsilon = 0.0;
    // Away from the degeneracy, zero mixing means zero transfer.
    CHECK(parity_transfer_amplitude(0.0, p) == 0.0);
    CHECK(parity_transfer_rabi(0.0, p) == 0.0);
}
