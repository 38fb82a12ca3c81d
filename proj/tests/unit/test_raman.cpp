#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "atomlink/error.hpp"
#include "atomlink/raman.hpp"
#include "oracles.hpp"

using namespace atomlink;
using namespace atomlink::raman;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

TEST_SUITE("raman") {

TEST_CASE("default config is a pi pulse on the three-level resonance") {
    const auto cfg = default_config();
    CHECK(cfg.two_photon_detuning == doctest::Approx(delta_three_level(cfg)));
    CHECK(transfer_probability(cfg, Scheme::ThreeLevel) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(effective_two_level(cfg, Scheme::ThreeLevel).rabi * cfg.pulse_duration_us == doctest::Approx(std::numbers::pi));
    CHECK(cfg.warnings().empty());
}

TEST_CASE("resonances sit at plus and minus the ground Zeeman offset") {
    const auto cfg = default_config();
    const double z = ground_zeeman_offset(cfg);
    CHECK(z / kTwoPi == doctest::Approx(0.3434).epsilon(0.003));
    // Light shifts are tens of kHz at 2.7 GHz detuning.
    CHECK(std::abs(delta_three_level(cfg) - z) / kTwoPi < 0.05);
    CHECK(std::abs(delta_four_level(cfg) + z) / kTwoPi < 0.05);
}

TEST_CASE("Rabi formula limits") {
    CHECK(rabi_transfer(1.0, 0.0, std::numbers::pi) == doctest::Approx(1.0));
    CHECK(rabi_transfer(1.0, 0.0, 2.0 * std::numbers::pi) == doctest::Approx(0.0));
    CHECK(rabi_transfer(0.0, 0.0, 1.0) == 0.0);
    CHECK(rabi_transfer(1.0, std::sqrt(3.0), 1.0) <= 0.25 + 1e-15);
}

TEST_CASE("effective model agrees with the full Hamiltonian across the spectrum") {
    auto cfg = default_config();
    double worst = 0.0;
    for (const auto& p : transfer_spectrum(cfg, -kTwoPi * 0.8, kTwoPi * 0.8, 161)) {
        auto probe = cfg;
        probe.two_photon_detuning = p.delta;
        worst = std::max(worst, std::abs(p.p_target - oracle::raman_transfer(probe, Scheme::ThreeLevel)));
        worst = std::max(worst, std::abs(p.p_blocked - oracle::raman_transfer(probe, Scheme::FourLevel)));
    }
    CHECK(worst < 0.01);
}

TEST_CASE("RK4 integration reproduces the exact propagator") {
    const auto cfg = default_config();
    const double exact = oracle::raman_transfer(cfg, Scheme::ThreeLevel);
    const double rk4 = oracle::raman_transfer(cfg, Scheme::ThreeLevel, oracle::Propagator::Rk4, 2e-6);
    CHECK(rk4 == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("selectivity") {
    const auto cfg = default_config();
    CHECK(selectivity_contrast(cfg) > 0.9);
    CHECK(selectivity_contrast_bound(cfg) <= selectivity_contrast(cfg) + 1e-12);
    const auto zero = default_config(0.0);
    CHECK(selectivity_contrast_bound(zero) < 0.7);
    CHECK(selectivity_contrast_bound(cfg) > 0.98);
}

TEST_CASE("tuning places the resonance and the pi time") {
    auto cfg = default_config();
    cfg.two_photon_detuning = 0.0;
    const auto t = tuned(cfg, Scheme::FourLevel);
    CHECK(transfer_probability(t, Scheme::FourLevel) == doctest::Approx(1.0));
    CHECK(t.two_photon_detuning == doctest::Approx(delta_four_level(cfg)));
}

TEST_CASE("degenerate and invalid configurations") {
    auto cfg = default_config();
    cfg.rabi_mk = cfg.rabi_nk;
    CHECK(delta_three_level(cfg) == doctest::Approx(ground_zeeman_offset(cfg)));
    auto zero_det = default_config(0.0);
    zero_det.mean_detuning = 0.0;
    CHECK_THROWS_AS(delta_three_level(zero_det), SingularityError);
    CHECK_FALSE(zero_det.warnings().empty());
    auto negative = default_config();
    negative.pulse_duration_us = -1.0;
    CHECK_THROWS_AS(transfer_probability(negative, Scheme::ThreeLevel), ParameterError);
    CHECK_THROWS_AS(transfer_spectrum(default_config(), 1.0, 0.0, 10), ParameterError);
    CHECK_THROWS_AS(dipole_config(0.2, 0.0, 8.0), ParameterError);
}

}
