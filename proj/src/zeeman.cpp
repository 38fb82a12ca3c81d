#include "atomlink/zeeman.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "atomlink/error.hpp"

namespace atomlink::zeeman {
namespace {

constexpr double kNuclearSpin = 1.5;
constexpr double kMultiplicity = 2.0 * kNuclearSpin + 1.0;

void validate_level(int f, int m) {
    if ((f != 1 && f != 2) || std::abs(m) > f) {
        throw ParameterError("invalid ground level F=" + std::to_string(f) + " mF=" + std::to_string(m));
    }
}

double field_parameter_slope(const AtomicConstants& c) {
    return (c.g_j - c.g_i) * c.mu_b_mhz_per_gauss / c.hfs_mhz;
}

bool stretched(int f, int m) { return f == 2 && std::abs(m) == 2; }

// Formula without the B >= 0 precondition; the derivative helpers evaluate at -h.
double energy_unchecked(int f, int m, double b, const AtomicConstants& c) {
    const double mu_b = c.mu_b_mhz_per_gauss;
    if (stretched(f, m)) {
        const double sign = m > 0 ? 1.0 : -1.0;
        return c.hfs_mhz * kNuclearSpin / kMultiplicity + sign * (c.g_j / 2.0 + kNuclearSpin * c.g_i) * mu_b * b;
    }
    const double x = field_parameter_slope(c) * b;
    const double root = std::sqrt(1.0 + 4.0 * m * x / kMultiplicity + x * x);
    const double branch = f == 2 ? 1.0 : -1.0;
    return -c.hfs_mhz / (2.0 * kMultiplicity) + c.g_i * mu_b * m * b + branch * 0.5 * c.hfs_mhz * root;
}

double slope_unchecked(int f, int m, double b, const AtomicConstants& c) {
    const double mu_b = c.mu_b_mhz_per_gauss;
    if (stretched(f, m)) {
        const double sign = m > 0 ? 1.0 : -1.0;
        return sign * (c.g_j / 2.0 + kNuclearSpin * c.g_i) * mu_b;
    }
    const double dx = field_parameter_slope(c);
    const double x = dx * b;
    const double root = std::sqrt(1.0 + 4.0 * m * x / kMultiplicity + x * x);
    const double branch = f == 2 ? 1.0 : -1.0;
    return c.g_i * mu_b * m + branch * 0.5 * c.hfs_mhz * (2.0 * m / kMultiplicity + x) * dx / root;
}

double frequency_unchecked(const QubitBasisSpec& spec, double b, const AtomicConstants& c) {
    return energy_unchecked(spec.upper.f, spec.upper.m, b, c) - energy_unchecked(spec.lower.f, spec.lower.m, b, c);
}

void validate_spec(const QubitBasisSpec& spec) {
    validate_level(spec.lower.f, spec.lower.m);
    validate_level(spec.upper.f, spec.upper.m);
    if (spec.lower.f == spec.upper.f && spec.lower.m == spec.upper.m) {
        throw ParameterError("qubit basis levels must be distinct");
    }
}

} // namespace

double AtomicConstants::g_f(int f) const {
    if (f == 1) {
        return -g_j / 4.0 + 5.0 * g_i / 4.0;
    }
    if (f == 2) {
        return g_j / 4.0 + 3.0 * g_i / 4.0;
    }
    throw ParameterError("g_F defined for F=1,2 only");
}

double breit_rabi_energy(int f, int m, double b_gauss, const AtomicConstants& c) {
    validate_level(f, m);
    detail::require_non_negative(b_gauss, "magnetic field");
    return energy_unchecked(f, m, b_gauss, c);
}

double breit_rabi_slope(int f, int m, double b_gauss, const AtomicConstants& c) {
    validate_level(f, m);
    detail::require_non_negative(b_gauss, "magnetic field");
    return slope_unchecked(f, m, b_gauss, c);
}

double transition_frequency(const QubitBasisSpec& spec, double b_gauss, const AtomicConstants& c) {
    validate_spec(spec);
    detail::require_non_negative(b_gauss, "magnetic field");
    return frequency_unchecked(spec, b_gauss, c);
}

double basis_sensitivity(const QubitBasisSpec& spec, double b_gauss, const AtomicConstants& c) {
    validate_spec(spec);
    detail::require_non_negative(b_gauss, "magnetic field");
    // Richardson table on central differences with the step halved each row.
    // Stops once successive diagonal entries agree to 1e-10 relative; otherwise
    // keeps the entry whose change was smallest (round-off eventually wins).
    auto central = [&](double h) {
        return (frequency_unchecked(spec, b_gauss + h, c) - frequency_unchecked(spec, b_gauss - h, c)) / (2.0 * h);
    };
    constexpr int kLevels = 8;
    double table[kLevels][kLevels] = {};
    double h = 0.5;
    double best = 0.0;
    double best_change = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kLevels; ++i) {
        table[i][0] = central(h);
        double factor = 4.0;
        for (int j = 1; j <= i; ++j) {
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
            factor *= 4.0;
        }
        if (i > 0) {
            const double change = std::abs(table[i][i] - table[i - 1][i - 1]);
            if (change < best_change) {
                best_change = change;
                best = table[i][i];
            }
            if (change <= 1e-10 * std::abs(table[i][i])) {
                break;
            }
        }
        h /= 2.0;
    }
    return best;
}

double basis_sensitivity_analytic(const QubitBasisSpec& spec, double b_gauss, const AtomicConstants& c) {
    validate_spec(spec);
    detail::require_non_negative(b_gauss, "magnetic field");
    return slope_unchecked(spec.upper.f, spec.upper.m, b_gauss, c) - slope_unchecked(spec.lower.f, spec.lower.m, b_gauss, c);
}

double suppression_factor(double b_gauss, const AtomicConstants& c) {
    const double initial = basis_sensitivity(QubitBasisSpec::initial(), b_gauss, c);
    const double memory = basis_sensitivity(QubitBasisSpec::memory(), b_gauss, c);
    if (memory == 0.0) {
        throw SingularityError("memory basis is field-insensitive at this field");
    }
    return std::abs(initial / memory);
}

double larmor_frequency_khz(QubitBasis basis, double b_gauss, const AtomicConstants& c) {
    const auto initial = QubitBasisSpec::initial();
    const double shift_khz = 1e3 * std::abs(transition_frequency(initial, b_gauss, c) - transition_frequency(initial, 0.0, c));
    if (basis == QubitBasis::Initial) {
        return shift_khz;
    }
    return shift_khz / suppression_factor(b_gauss, c);
}

} // namespace atomlink::zeeman
