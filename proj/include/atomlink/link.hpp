#pragma once

// Photon-path budget: fiber loss and latency, conversion/filter/detection
// efficiencies, detector dark counts and conversion background, acceptance
// window, signal-to-noise ratio.

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace atomlink::link {

struct LinkParams {
    double length_km = 0.0;
    double attenuation_db_per_km = 0.2;
    /// Calibrated so 101 km corresponds to a 497.4 us arrival time.
    double fiber_speed_km_per_s = 101.0 / 497.4e-6;

    double eta_collect = 0.0105;
    double eta_switch = 0.85;
    double eta_qfc = 0.48;
    double eta_filter = 0.82;
    double eta_projection = 0.85;
    double eta_connectors = 0.94;
    double eta_detector = 0.597;

    int n_detectors = 2;
    double dark_count_cps = 7.21;         ///< effective, per detector
    double qfc_background_cps = 215.5;    ///< detected-equivalent rate at converter output
    double window_ns = 50.0;
    double window_fraction = 0.62;

    void validate() const;
};

/// (2/3) c in km/s.
inline constexpr double kTwoThirdsLightSpeed = 299792.458 * 2.0 / 3.0;

struct ClickBreakdown {
    double p_signal = 0.0;
    double p_qfc = 0.0;
    double p_dark = 0.0;

    double noise() const { return p_qfc + p_dark; }
    double total() const { return p_signal + p_qfc + p_dark; }
};

double fiber_transmission(double length_km, double attenuation_db_per_km);

/// us
double travel_time_us(double length_km, double fiber_speed_km_per_s);

/// Product of all path efficiencies except the fiber and the window.
double zero_length_efficiency(const LinkParams& params);

double signal_click_probability(const LinkParams& params);

struct NoiseClicks {
    double p_qfc = 0.0;
    double p_dark = 0.0;
};

NoiseClicks noise_click_probability(const LinkParams& params);

ClickBreakdown click_breakdown(const LinkParams& params);

/// Signal over total noise; +infinity when there is no noise.
double snr(const LinkParams& params);

/// Length where conversion background equals detector dark counts (km);
/// 0 if dark counts dominate everywhere, +infinity if they never do.
double noise_crossover_km(const LinkParams& params);

struct SnrAnchor {
    double length_km = 0.0;
    double snr = 0.0;
    std::optional<double> dark_count_override_cps;
};

/// Least-squares fit (log-SNR residuals) of qfc_background_cps and
/// dark_count_cps to measured SNR anchors; every other field is kept.
LinkParams calibrate_noise(const LinkParams& params, std::span<const SnrAnchor> anchors);

struct SweepRow {
    double length_km = 0.0;
    ClickBreakdown clicks;
    double snr = 0.0;
};

std::vector<SweepRow> snr_sweep(const LinkParams& params, std::span<const double> lengths_km);

} // namespace atomlink::link
