#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "phaseslip/config.hpp"
#include "phaseslip/sweep.hpp"

using namespace phaseslip;
using std::numbers::pi;

TEST_CASE("defaults reproduce the headline parameter set") {
    RunConfig cfg;
    cfg.finalize();
    CHECK(cfg.circuit.e_c == 3.0);
    CHECK(cfg.circuit.e_l == 1.0);
    CHECK(cfg.circuit.e_m == 25.0);
    CHECK(cfg.circuit.delta_gap == 200.0);
    CHECK(cfg.circuit.epsilon == 0.025);
    CHECK(cfg.poisoning_rate_per_ns == doctest::Approx(1e-4)); // tau_qp = 10 us
    CHECK(cfg.grid.phi_min == doctest::Approx(-6.0 * pi));
    CHECK(cfg.grid.phi_max == doctest::Approx(10.0 * pi));
    CHECK(cfg.grid.n == 4096);

    const auto p = cfg.to_protocol();
    CHECK(p.hold_times.size() == 41); // 0..80 ns step 2
    CHECK(p.hold_times.front() == 0.0);
    CHECK(p.hold_times.back() == doctest::Approx(80.0));
    CHECK(p.phi_e_hold == doctest::Approx(2.0 * pi));
}

TEST_CASE("apply sets keys and rejects unknown ones") {
    RunConfig cfg;
    cfg.apply("circuit.e_c_ghz", "5.5");
    CHECK(cfg.circuit.e_c == 5.5);
    cfg.apply("circuit.junction_mode", "combined");
    CHECK(cfg.circuit.mode == JunctionMode::combined);
    cfg.apply("circuit.charge_convention", "cooper_pair");
    CHECK(cfg.circuit.convention == ChargeConvention::cooper_pair);
    cfg.apply("grid.phi_min_pi", "-4");
    CHECK(cfg.grid.phi_min == doctest::Approx(-4.0 * pi));
    cfg.apply("protocol.hold_times_ns", "0, 10, 20");
    CHECK(cfg.hold_times_ns == std::vector<double>{0.0, 10.0, 20.0});
    cfg.apply("protocol.measurement", "expectation");
    CHECK(cfg.measurement == Measurement::expectation);
    cfg.apply("protocol.seed", "99");
    CHECK(cfg.seed == 99);
    cfg.apply("wire.epsilon_from_length", "true");
    CHECK(cfg.epsilon_from_length);

    CHECK_THROWS_WITH_AS(cfg.apply("circuit.bogus", "1"),
                         doctest::Contains("circuit.bogus"), ConfigError);
    CHECK_THROWS_AS(cfg.apply("circuit.e_c_ghz", "abc"), ConfigError);
    CHECK_THROWS_AS(cfg.apply("grid.points", "12.5"), ConfigError);
    CHECK_THROWS_AS(cfg.apply("wire.epsilon_from_length", "maybe"), ConfigError);
    CHECK_THROWS_AS(cfg.apply("circuit.junction_mode", "weird"), ConfigError);
    CHECK_THROWS_AS(cfg.apply("protocol.hold_times_ns", " , "), ConfigError);
}

TEST_CASE("coupled junction keys resolve consistently") {
    RunConfig cfg;
    cfg.apply("circuit.e_m_ghz", "20");
    cfg.finalize();
    CHECK(cfg.circuit.transparency == doctest::Approx(0.01).epsilon(1e-12));

    cfg = RunConfig{};
    cfg.apply("circuit.delta_ghz", "100");
    cfg.finalize();
    CHECK(cfg.circuit.e_m == doctest::Approx(12.5).epsilon(1e-12));

    cfg = RunConfig{};
    cfg.apply("circuit.transparency", "0.04");
    cfg.finalize();
    CHECK(cfg.circuit.e_m == doctest::Approx(40.0).epsilon(1e-12));

    cfg = RunConfig{};
    cfg.apply("circuit.e_m_ghz", "50");
    cfg.apply("circuit.delta_ghz", "100");
    cfg.finalize();
    CHECK(cfg.circuit.transparency == doctest::Approx(0.25).epsilon(1e-12));

    // All three set but inconsistent: rejected.
    cfg = RunConfig{};
    cfg.apply("circuit.e_m_ghz", "10");
    cfg.apply("circuit.delta_ghz", "100");
    cfg.apply("circuit.transparency", "0.5");
    CHECK_THROWS_AS(cfg.finalize(), ConfigError);

    // e_m above the gap cannot be realized by any transparency.
    cfg = RunConfig{};
    cfg.apply("circuit.e_m_ghz", "300");
    CHECK_THROWS_AS(cfg.finalize(), ConfigError);
}

TEST_CASE("epsilon can be derived from the wire length") {
    RunConfig cfg;
    cfg.apply("wire.epsilon_from_length", "true");
    cfg.finalize();
    CHECK(cfg.circuit.epsilon ==
          doctest::Approx(100.0 * std::exp(-2.0 / 0.2413)).epsilon(1e-12));
}

TEST_CASE("INI parsing") {
    std::istringstream in(R"(# comment line
[circuit]
e_c_ghz = 4  ; trailing comment
junction_mode = trivial_full

[protocol]
shots_per_point = 17
)");
    const auto cfg = parse_config_text(in);
    CHECK(cfg.circuit.e_c == 4.0);
    CHECK(cfg.circuit.mode == JunctionMode::trivial_full);
    CHECK(cfg.shots_per_point == 17);

    std::istringstream bad1("e_c_ghz = 4\n");
    CHECK_THROWS_AS(parse_config_text(bad1), ConfigError);
    std::istringstream bad2("[circuit\ne_c_ghz = 4\n");
    CHECK_THROWS_AS(parse_config_text(bad2), ConfigError);
    std::istringstream bad3("[circuit]\nno_equals_here\n");
    CHECK_THROWS_AS(parse_config_text(bad3), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/path.ini"), ConfigError);
}

TEST_CASE("sweep value generation") {
    const auto lin = SweepSpec::linear_range(0.0, 1.0, 5);
    REQUIRE(lin.size() == 5);
    CHECK(lin[0] == 0.0);
    CHECK(lin[2] == doctest::Approx(0.5));
    CHECK(lin[4] == 1.0);
    CHECK(SweepSpec::linear_range(3.0, 9.0, 1) == std::vector<double>{3.0});

    const auto lg = SweepSpec::log_range(1e-4, 1.0, 5);
    REQUIRE(lg.size() == 5);
    CHECK(lg[0] == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(lg[2] == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(lg[4] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(SweepSpec::log_range(-1.0, 1.0, 3), ConfigError);
    CHECK_THROWS_AS(SweepSpec::linear_range(0.0, 1.0, 0), ConfigError);

    CHECK(parse_sweep_target("splitting") == SweepTarget::splitting);
    CHECK(parse_sweep_target("separation") == SweepTarget::separation);
    CHECK(parse_sweep_target("visibility") == SweepTarget::visibility);
    CHECK_THROWS_AS(parse_sweep_target("wat"), ConfigError);
}

TEST_CASE("sweeping the inductive energy shrinks the well separation") {
    RunConfig base;
    SweepSpec spec;
    // Stay below E_L = E_m/8 = 3.125 GHz, where the double well disappears.
    spec.path = "circuit.e_l_ghz";
    spec.values = {0.5, 1.0, 2.0, 3.0};
    const auto rows = run_sweep(base, spec, SweepTarget::separation);
    REQUIRE(rows.size() == 4);
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].ok);
        if (i > 0) CHECK(rows[i].target < rows[i - 1].target);
    }
}

TEST_CASE("sweeping the wire length decays epsilon exponentially") {
    RunConfig base;
    base.apply("wire.epsilon_from_length", "true");
    SweepSpec spec;
    spec.path = "wire.length_um";
    spec.values = {1.0, 2.0, 3.0};
    const auto rows = run_sweep(base, spec, SweepTarget::separation);
    REQUIRE(rows.size() == 3);
    const double decay = std::exp(-1.0 / 0.2413);
    CHECK(rows[1].epsilon / rows[0].epsilon == doctest::Approx(decay).epsilon(1e-9));
    CHECK(rows[2].epsilon / rows[1].epsilon == doctest::Approx(decay).epsilon(1e-9));
}

TEST_CASE("splitting sweep over weak parity mixing") {
    RunConfig base;
    base.apply("grid.points", "2048");
    SweepSpec spec;
    spec.path = "circuit.epsilon_ghz";
    spec.values = {1e-4, 1e-3, 1e-2};
    const auto rows = run_sweep(base, spec, SweepTarget::splitting);
    // Frozen from the independent dense two-component solver at n = 2048.
    const double ref[3] = {0.025019187563886547, 0.02501908507111139,
                           0.025008835938931995};
    REQUIRE(rows.size() == 3);
    for (int i = 0; i < 3; ++i) {
        REQUIRE(rows[i].ok);
        CHECK(rows[i].target == doctest::Approx(ref[i]).epsilon(1e-6));
    }
}

TEST_CASE("a failing sweep point is recorded and the sweep continues") {
    RunConfig base;
    SweepSpec spec;
    spec.path = "circuit.e_l_ghz";
    spec.values = {1.0, -2.0, 2.0};
    const auto rows = run_sweep(base, spec, SweepTarget::separation);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].ok);
    CHECK_FALSE(rows[1].ok);
    CHECK_FALSE(rows[1].error.empty());
    CHECK(rows[2].ok);
}
