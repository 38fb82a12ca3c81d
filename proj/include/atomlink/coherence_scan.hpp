#pragma once

// Synthetic storage-time scan: binomial fringe counts at each delay, a
// sinusoid fit per delay and an exponential fit across delays.

#include <cstdint>
#include <vector>

#include "atomlink/analysis.hpp"
#include "atomlink/decoherence.hpp"

namespace atomlink::decoherence {

struct ScanConfig {
    CoherenceModel model;
    std::vector<double> delays_us;
    int angles = 8;                       ///< atom analysis angles over [0, pi)
    std::uint64_t counts_per_angle = 1000;
    std::uint64_t seed = 1;
};

struct ScanPoint {
    double delay_us = 0.0;
    analysis::FringeFit fringe;
};

struct ScanResult {
    std::vector<ScanPoint> points;
    analysis::DecayFit decay;
};

/// n delays evenly spaced over [0, t_max].
std::vector<double> linear_delays(double t_max_us, int n);

ScanResult run_scan(const ScanConfig& config);

} // namespace atomlink::decoherence
