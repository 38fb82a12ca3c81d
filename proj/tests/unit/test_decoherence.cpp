#include <doctest.h>

#include <cmath>

#include "atomlink/coherence_scan.hpp"
#include "atomlink/decoherence.hpp"
#include "atomlink/error.hpp"
#include "atomlink/qstate.hpp"

using namespace atomlink;
using namespace atomlink::decoherence;

TEST_SUITE("decoherence") {

TEST_CASE("visibility decays to 1/e at T2") {
    CoherenceModel m{zeeman::QubitBasis::Memory, 6910.0, 0.8, 0.0};
    CHECK(visibility_at(m, 0.0) == doctest::Approx(0.8));
    CHECK(visibility_at(m, 6910.0) == doctest::Approx(0.8 / std::exp(1.0)));
    m.shape = DecayShape::Gaussian;
    CHECK(decay_factor(m, 2.0 * 6910.0) == doctest::Approx(std::exp(-4.0)));
}

TEST_CASE("evolved state carries the decay in its X correlator") {
    const auto m = make_model(zeeman::QubitBasis::Initial, 322.5, 1.0, 0.2445);
    const double t = 100.0;
    auto rho = evolve(qstate::ideal_entangled_state(), m, t);
    rho = qstate::apply_larmor(rho, -precession_phase(m, t));
    CHECK(qstate::correlator(rho, qstate::correlated_setting(qstate::Basis::X)) == doctest::Approx(std::exp(-t / 322.5)));
    CHECK(qstate::correlator(rho, qstate::correlated_setting(qstate::Basis::Z)) == doctest::Approx(1.0));
}

TEST_CASE("memory basis precesses slower by the suppression factor") {
    const auto ini = make_model(zeeman::QubitBasis::Initial, 322.5, 1.0, 0.2445);
    const auto mem = make_model(zeeman::QubitBasis::Memory, 6910.0, 1.0, 0.2445);
    CHECK(ini.larmor_khz / mem.larmor_khz == doctest::Approx(zeeman::suppression_factor(0.2445)));
}

TEST_CASE("invalid models") {
    CoherenceModel m;
    m.t2_us = 0.0;
    CHECK_THROWS_AS(m.validate(), ParameterError);
    m.t2_us = 10.0;
    m.v0 = 1.5;
    CHECK_THROWS_AS(visibility_at(m, 1.0), ParameterError);
    m.v0 = 1.0;
    CHECK_THROWS_AS(visibility_at(m, -1.0), ParameterError);
}

TEST_CASE("synthetic scan recovers T2") {
    ScanConfig cfg;
    cfg.model = make_model(zeeman::QubitBasis::Initial, 322.5, 0.85, 0.2445);
    cfg.delays_us = linear_delays(3.0 * 322.5, 12);
    cfg.seed = 5;
    const auto res = run_scan(cfg);
    REQUIRE(res.points.size() == 12);
    CHECK(res.decay.t2 == doctest::Approx(322.5).epsilon(0.05));
    CHECK(res.decay.v0 == doctest::Approx(0.85).epsilon(0.05));
    CHECK(res.points.front().fringe.visibility == doctest::Approx(0.85).epsilon(0.05));
}

TEST_CASE("scan is reproducible and rejects degenerate input") {
    ScanConfig cfg;
    cfg.model = make_model(zeeman::QubitBasis::Memory, 6910.0, 0.8, 0.2445);
    cfg.delays_us = linear_delays(20000.0, 6);
    const auto a = run_scan(cfg);
    const auto b = run_scan(cfg);
    CHECK(a.decay.t2 == b.decay.t2);
    cfg.delays_us = {1000.0};
    CHECK_THROWS(run_scan(cfg));
    cfg.delays_us = {};
    CHECK_THROWS_AS(run_scan(cfg), FitError);
    CHECK_THROWS_AS(linear_delays(1000.0, 0), ParameterError);
    cfg.delays_us = linear_delays(1000.0, 4);
    cfg.angles = 3;
    CHECK_THROWS_AS(run_scan(cfg), ParameterError);
}

}
