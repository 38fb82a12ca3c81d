#pragma once

// Count reduction: sinusoid and exponential-decay fits, fidelity bound, CHSH,
// error-budget composition.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace atomlink {
class Rng;
}

namespace atomlink::analysis {

struct FitPoint {
    double x = 0.0;
    double y = 0.0;
    /// 1-sigma uncertainty of y. If every point has sigma > 0 the fit is
    /// weighted and the covariance is absolute; otherwise it is scaled by the
    /// reduced residual sum of squares.
    double sigma = 0.0;
};

/// p(theta) = offset + amplitude * cos(2 (theta - phase)), amplitude >= 0,
/// phase in [0, pi).
struct FringeFit {
    double offset = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
    double visibility = 0.0;
    double sigma_offset = 0.0;
    double sigma_amplitude = 0.0;
    double sigma_phase = 0.0;
    double sigma_visibility = 0.0;
    double chi2 = 0.0;
    int iterations = 0;
};

FringeFit fit_sinusoid(std::span<const FitPoint> points);

/// Residual-resampling bootstrap of the visibility; returns its standard deviation.
double bootstrap_visibility_sigma(std::span<const FitPoint> points, int n_resamples, Rng& rng);

double fringe_model(const FringeFit& fit, double theta);

struct DecayFit {
    double t2 = 0.0;   ///< +infinity when the data do not decay
    double v0 = 0.0;
    double sigma_t2 = 0.0;
    double sigma_v0 = 0.0;
    double chi2 = 0.0;
    int iterations = 0;
    std::vector<std::string> warnings;
};

/// y(t) = V0 exp(-t / T2).
DecayFit fit_exponential(std::span<const FitPoint> points);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

Rational make_rational(std::int64_t num, std::int64_t den);

/// F = 1/6 + (5/6) V, clamped to [0, 1].
double fidelity_lower_bound(double mean_visibility);
Rational fidelity_lower_bound(Rational mean_visibility);

struct SettingCounts {
    std::uint64_t same = 0;
    std::uint64_t different = 0;

    std::uint64_t total() const { return same + different; }
};

struct CorrelatorEstimate {
    double value = 0.0;
    double sigma = 0.0;
};

/// E = (same - different) / N with sigma^2 = (1 - E^2) / N.
CorrelatorEstimate correlator_from_counts(const SettingCounts& counts);

struct ChshEstimate {
    double s = 0.0;
    double sigma = 0.0;
    std::array<CorrelatorEstimate, 4> correlators{};
};

/// S = |E1 + E2 + E3 - E4| in the order of the input settings.
ChshEstimate chsh_from_counts(std::span<const SettingCounts, 4> counts);
double chsh_from_correlators(std::span<const double, 4> e);

struct ErrorBudget {
    double snr_readout = 0.0;
    double decoherence = 0.0;
    double raman_transfers = 0.0;
    double readout = 0.0;
    double entanglement_generation = 0.0;
    double readout_timing = 0.0;
    double drifts = 0.0;

    void validate() const;
    std::array<double, 7> terms() const;
    static std::array<const char*, 7> names();
};

enum class Composition { Multiplicative, Additive };

/// Visibility left after the listed losses.
double compose_visibility(const ErrorBudget& budget, Composition rule = Composition::Multiplicative);

/// fidelity_lower_bound(compose_visibility(...)).
double compose_error_budget(const ErrorBudget& budget, Composition rule = Composition::Multiplicative);

} // namespace atomlink::analysis
