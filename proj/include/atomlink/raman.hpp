#pragma once

// Zeeman-state-selective Raman transfer between F=1 and F=2 with a sigma+ pair
// on the D1 line, reduced to an effective two-level system.
//
// Frequencies are angular MHz (rad/us), times are us, fields are gauss.
//
// Three-level scheme: m = |1,+1> (up_z), n = |2,+1>, k = |F'=2,+2>.
// Four-level scheme:  a = |1,-1> (down_z), b = |2,-1>, via |F'=1,0> (3) and |F'=2,0> (4).
//
// Sign convention: the ground Zeeman offset is +2|g_F| mu_B B for the
// three-level pair and -2|g_F| mu_B B for the four-level pair, with |g_F|
// taken from zeeman::AtomicConstants::g_f(1); the excited shift uses
// +g_F' = +1/6. The mean single-photon detuning is positive for blue detuning
// from F'=2.

#include <string>
#include <vector>

#include "atomlink/zeeman.hpp"

namespace atomlink::raman {

enum class Scheme { ThreeLevel, FourLevel };

struct RamanConfig {
    double b_gauss = 0.2445;
    double mean_detuning = 0.0;
    double rabi_mk = 0.0;
    double rabi_nk = 0.0;
    double rabi_a3 = 0.0;
    double rabi_b3 = 0.0;
    double rabi_a4 = 0.0;
    double rabi_b4 = 0.0;
    double two_photon_detuning = 0.0;
    double pulse_duration_us = 8.0;
    zeeman::AtomicConstants constants{};

    /// Throws ParameterError on hard violations (t < 0, non-finite values).
    void validate() const;

    /// Soft violations, e.g. mean detuning not >> Rabi frequencies.
    std::vector<std::string> warnings() const;
};

/// Defaults: 2pi x 2.7 GHz mean detuning, Rabi frequencies in the ratio of the
/// D1 sigma+ dipole matrix elements, scaled so the three-level pi time is 8 us.
RamanConfig default_config(double b_gauss = 0.2445);

/// Same construction for an arbitrary mean detuning (angular MHz) and pi time.
RamanConfig dipole_config(double b_gauss, double mean_detuning, double pi_time_us,
                          const zeeman::AtomicConstants& constants = zeeman::default_constants());

struct EffectiveTwoLevel {
    double rabi = 0.0;      ///< Omega_eff > 0
    double detuning = 0.0;  ///< Delta_eff = delta - delta_opt
};

/// 2|g_F| mu_B B in angular MHz.
double ground_zeeman_offset(const RamanConfig& cfg);

double delta_three_level(const RamanConfig& cfg);
double delta_four_level(const RamanConfig& cfg);
double optimal_detuning(const RamanConfig& cfg, Scheme scheme);

EffectiveTwoLevel effective_two_level(const RamanConfig& cfg, Scheme scheme);

/// Closed-form Rabi solution of the effective two-level system.
double rabi_transfer(double rabi, double detuning, double t_us);

double transfer_probability(const RamanConfig& cfg, Scheme scheme);

/// Copy of cfg with delta at the scheme's optimum and t set to a pi pulse.
RamanConfig tuned(const RamanConfig& cfg, Scheme scheme);

struct SpectrumPoint {
    double delta = 0.0;      ///< angular MHz
    double p_target = 0.0;   ///< three-level (up_z) transfer
    double p_blocked = 0.0;  ///< four-level (down_z) transfer
};

std::vector<SpectrumPoint> transfer_spectrum(const RamanConfig& cfg, double delta_min, double delta_max, int n_points);

/// p(target transferred) - p(blocked transferred) at cfg's two-photon detuning,
/// target being the three-level scheme. Non-negative when cfg is tuned to it.
double selectivity_contrast(const RamanConfig& cfg);

/// Worst case over pulse-area fluctuations: the blocked transfer replaced by
/// its Rabi envelope Omega^2 / (Omega^2 + Delta^2).
double selectivity_contrast_bound(const RamanConfig& cfg);

} // namespace atomlink::raman
