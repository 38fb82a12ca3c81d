#include "atomlink/raman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "atomlink/error.hpp"

namespace atomlink::raman {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Relative D1 sigma+ dipole matrix elements <F',m+1| d |F,m> (Wigner-Eckart,
// common reduced element dropped).
constexpr double kDipoleMk = -0.70710678118654752;
constexpr double kDipoleNk = 0.40824829046386302;
constexpr double kDipoleA3 = -0.28867513459481288;
constexpr double kDipoleB3 = 0.5;
constexpr double kDipoleA4 = -0.28867513459481288;
constexpr double kDipoleB4 = 0.5;

double checked_ratio(double num, double den, const char* what) {
    if (std::abs(den) < 1e-300) {
        throw SingularityError(std::string("vanishing denominator in ") + what);
    }
    return num / den;
}

double excited_zeeman_term(const RamanConfig& cfg) {
    return kTwoPi * 8.0 * cfg.constants.g_f_excited * cfg.constants.mu_b_mhz_per_gauss * cfg.b_gauss;
}

double excited_hfs(const RamanConfig& cfg) { return kTwoPi * cfg.constants.excited_hfs_mhz; }

} // namespace

void RamanConfig::validate() const {
    const double values[] = {b_gauss, mean_detuning, rabi_mk, rabi_nk, rabi_a3, rabi_b3,
                             rabi_a4, rabi_b4, two_photon_detuning, pulse_duration_us};
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ParameterError("Raman configuration contains a non-finite value");
        }
    }
    detail::require_non_negative(pulse_duration_us, "Raman pulse duration");
    detail::require_non_negative(b_gauss, "bias field");
}

std::vector<std::string> RamanConfig::warnings() const {
    std::vector<std::string> out;
    const double max_rabi = std::max({std::abs(rabi_mk), std::abs(rabi_nk), std::abs(rabi_a3), std::abs(rabi_b3),
                                      std::abs(rabi_a4), std::abs(rabi_b4)});
    if (std::abs(mean_detuning) < 10.0 * max_rabi) {
        out.emplace_back("mean single-photon detuning is not >> Rabi frequencies; adiabatic elimination is unreliable");
    }
    return out;
}

RamanConfig dipole_config(double b_gauss, double mean_detuning, double pi_time_us,
                          const zeeman::AtomicConstants& constants) {
    if (!(pi_time_us > 0.0) || !(mean_detuning != 0.0) || !std::isfinite(mean_detuning)) {
        throw ParameterError("dipole_config needs a positive pi time and a nonzero mean detuning");
    }
    RamanConfig cfg;
    cfg.b_gauss = b_gauss;
    cfg.constants = constants;
    cfg.mean_detuning = mean_detuning;
    // Field amplitude E with Omega_ij = E d_ij; pick E so the three-level pulse area is pi.
    const double target_rabi = std::numbers::pi / pi_time_us;
    const double e2 = 2.0 * std::abs(cfg.mean_detuning) * target_rabi / std::abs(kDipoleMk * kDipoleNk);
    const double e = std::sqrt(e2);
    cfg.rabi_mk = e * kDipoleMk;
    cfg.rabi_nk = e * kDipoleNk;
    cfg.rabi_a3 = e * kDipoleA3;
    cfg.rabi_b3 = e * kDipoleB3;
    cfg.rabi_a4 = e * kDipoleA4;
    cfg.rabi_b4 = e * kDipoleB4;
    cfg.pulse_duration_us = pi_time_us;
    cfg.two_photon_detuning = delta_three_level(cfg);
    return cfg;
}

RamanConfig default_config(double b_gauss) { return dipole_config(b_gauss, kTwoPi * 2700.0, 8.0); }

double ground_zeeman_offset(const RamanConfig& cfg) {
    return kTwoPi * 2.0 * std::abs(cfg.constants.g_f(1)) * cfg.constants.mu_b_mhz_per_gauss * cfg.b_gauss;
}

double delta_three_level(const RamanConfig& cfg) {
    cfg.validate();
    const double light = cfg.rabi_nk * cfg.rabi_nk - cfg.rabi_mk * cfg.rabi_mk;
    const double den = 4.0 * cfg.mean_detuning - excited_zeeman_term(cfg);
    if (light == 0.0) {
        // The light-shift term vanishes regardless of the denominator.
        return ground_zeeman_offset(cfg);
    }
    return ground_zeeman_offset(cfg) + checked_ratio(light, den, "three-level light shift");
}

double delta_four_level(const RamanConfig& cfg) {
    cfg.validate();
    const double light3 = cfg.rabi_b3 * cfg.rabi_b3 - cfg.rabi_a3 * cfg.rabi_a3;
    const double light4 = cfg.rabi_b4 * cfg.rabi_b4 - cfg.rabi_a4 * cfg.rabi_a4;
    double delta = -ground_zeeman_offset(cfg);
    if (light3 != 0.0) {
        delta += checked_ratio(light3, 4.0 * cfg.mean_detuning + 4.0 * excited_hfs(cfg), "four-level light shift (F'=1)");
    }
    if (light4 != 0.0) {
        delta += checked_ratio(light4, 4.0 * cfg.mean_detuning, "four-level light shift (F'=2)");
    }
    return delta;
}

double optimal_detuning(const RamanConfig& cfg, Scheme scheme) {
    return scheme == Scheme::ThreeLevel ? delta_three_level(cfg) : delta_four_level(cfg);
}

EffectiveTwoLevel effective_two_level(const RamanConfig& cfg, Scheme scheme) {
    const double delta_opt = optimal_detuning(cfg, scheme);
    double rabi = 0.0;
    if (scheme == Scheme::ThreeLevel) {
        rabi = checked_ratio(cfg.rabi_mk * cfg.rabi_nk, 2.0 * cfg.mean_detuning, "three-level effective coupling");
    } else {
        rabi = checked_ratio(cfg.rabi_a3 * cfg.rabi_b3, 2.0 * (cfg.mean_detuning + excited_hfs(cfg)), "four-level coupling via F'=1") +
               checked_ratio(cfg.rabi_a4 * cfg.rabi_b4, 2.0 * cfg.mean_detuning, "four-level coupling via F'=2");
    }
    rabi = std::abs(rabi);
    if (!(rabi > 0.0)) {
        throw ParameterError("effective Rabi frequency vanishes");
    }
    return {rabi, cfg.two_photon_detuning - delta_opt};
}

double rabi_transfer(double rabi, double detuning, double t_us) {
    const double generalized2 = rabi * rabi + detuning * detuning;
    if (generalized2 == 0.0) {
        return 0.0;
    }
    const double s = std::sin(std::sqrt(generalized2) * t_us / 2.0);
    return std::clamp(rabi * rabi / generalized2 * s * s, 0.0, 1.0);
}

double transfer_probability(const RamanConfig& cfg, Scheme scheme) {
    const auto eff = effective_two_level(cfg, scheme);
    return rabi_transfer(eff.rabi, eff.detuning, cfg.pulse_duration_us);
}

RamanConfig tuned(const RamanConfig& cfg, Scheme scheme) {
    RamanConfig out = cfg;
    out.two_photon_detuning = optimal_detuning(cfg, scheme);
    out.pulse_duration_us = std::numbers::pi / effective_two_level(out, scheme).rabi;
    return out;
}

std::vector<SpectrumPoint> transfer_spectrum(const RamanConfig& cfg, double delta_min, double delta_max, int n_points) {
    if (n_points < 2) {
        throw ParameterError("spectrum needs at least two points");
    }
    if (!(delta_max > delta_min)) {
        throw ParameterError("spectrum range must be increasing");
    }
    std::vector<SpectrumPoint> out(static_cast<std::size_t>(n_points));
    const double step = (delta_max - delta_min) / (n_points - 1);
    RamanConfig probe = cfg;
    for (int i = 0; i < n_points; ++i) {
        probe.two_photon_detuning = delta_min + step * i;
        auto& point = out[static_cast<std::size_t>(i)];
        point.delta = probe.two_photon_detuning;
        point.p_target = transfer_probability(probe, Scheme::ThreeLevel);
        point.p_blocked = transfer_probability(probe, Scheme::FourLevel);
    }
    return out;
}

double selectivity_contrast(const RamanConfig& cfg) {
    return transfer_probability(cfg, Scheme::ThreeLevel) - transfer_probability(cfg, Scheme::FourLevel);
}

double selectivity_contrast_bound(const RamanConfig& cfg) {
    const auto blocked = effective_two_level(cfg, Scheme::FourLevel);
    const double envelope = blocked.rabi * blocked.rabi / (blocked.rabi * blocked.rabi + blocked.detuning * blocked.detuning);
    return transfer_probability(cfg, Scheme::ThreeLevel) - envelope;
}

} // namespace atomlink::raman
