#pragma once

// 87Rb 5S1/2 ground-state Zeeman structure (J = 1/2, I = 3/2).
//
// Units: MHz for energies/frequencies, gauss for fields.
//
// Sign conventions (one table, used everywhere in the library):
//   quantity            value            note
//   g_J                 +2.00233113      electron
//   g_I                 -0.0009951414    nuclear, sign as in E = ... + g_I mu_B m B
//   g_F(F=1)            -g_J/4 + 5g_I/4  ~ -0.5018 (physical sign)
//   g_F(F=2)            +g_J/4 + 3g_I/4  ~ +0.4998
//   g_F'(5P1/2, F'=2)   +1/6
//   mu_B                1.399624604 MHz/G
//   hfs splitting       6834.682610904 MHz   E(F=2) - E(F=1) at B = 0
//   hfs' splitting      814.5 MHz        5P1/2 F'=2 - F'=1
// The Raman module quotes magnitudes (|g_F| = 1/2, |g_F'| = 1/6) with the sign
// chosen so the up_z -> |2,+1> Zeeman offset is positive; see raman.hpp.

#include <cmath>

namespace atomlink::zeeman {

struct AtomicConstants {
    double g_j = 2.00233113;
    double g_i = -0.0009951414;
    double mu_b_mhz_per_gauss = 1.399624604;
    double hfs_mhz = 6834.682610904;
    double excited_hfs_mhz = 814.5;
    double g_f_excited = 1.0 / 6.0;

    /// Linear Lande factor of a ground hyperfine level, including the nuclear term.
    double g_f(int f) const;
};

inline const AtomicConstants& default_constants() {
    static const AtomicConstants constants{};
    return constants;
}

struct Level {
    int f = 1;
    int m = 0;
};

enum class QubitBasis { Initial, Memory };

struct QubitBasisSpec {
    Level lower;
    Level upper;

    static QubitBasisSpec initial() { return {{1, -1}, {1, +1}}; }
    static QubitBasisSpec memory() { return {{1, -1}, {2, +1}}; }
    static QubitBasisSpec of(QubitBasis basis) { return basis == QubitBasis::Initial ? initial() : memory(); }
};

/// Exact Breit-Rabi energy (MHz) relative to the zero-field hyperfine centroid.
double breit_rabi_energy(int f, int m, double b_gauss, const AtomicConstants& c = default_constants());

/// Closed-form dE/dB (MHz/G).
double breit_rabi_slope(int f, int m, double b_gauss, const AtomicConstants& c = default_constants());

/// nu(B) = E(upper) - E(lower), MHz.
double transition_frequency(const QubitBasisSpec& spec, double b_gauss, const AtomicConstants& c = default_constants());

/// d nu / dB by Richardson-extrapolated central differences (MHz/G).
double basis_sensitivity(const QubitBasisSpec& spec, double b_gauss, const AtomicConstants& c = default_constants());

/// Same derivative from the closed-form slopes.
double basis_sensitivity_analytic(const QubitBasisSpec& spec, double b_gauss, const AtomicConstants& c = default_constants());

/// chi(B) = |sensitivity(initial)| / |sensitivity(memory)|.
double suppression_factor(double b_gauss, const AtomicConstants& c = default_constants());

/// Phase-precession frequency (kHz) of a basis at field B, relative to the
/// zero-field transition: |nu(B) - nu(0)| for the initial basis, that value
/// divided by chi(B) for the memory basis.
double larmor_frequency_khz(QubitBasis basis, double b_gauss, const AtomicConstants& c = default_constants());

} // namespace atomlink::zeeman
