#pragma once

#include <span>
#include <vector>

#include "atomlink/link.hpp"

namespace atomlink::rate {

/// Per-attempt time components (us). The cooling stage is amortized over the
/// attempts of one burst.
struct TimingBudget {
    double prep_us = 3.0;
    double entangle_us = 0.2;
    double raman_us = 8.0;
    double cooling_us = 6500.0;
    int attempts_per_cooling = 11;

    void validate() const;

    double cooling_share_us() const { return cooling_us / attempts_per_cooling; }

    /// T_{L=0}
    double zero_length_period_us() const { return prep_us + entangle_us + raman_us + cooling_share_us(); }
};

struct RateResult {
    double length_km = 0.0;
    double period_us = 0.0;
    double repetition_hz = 0.0;
    double eta = 0.0;
    double rate_per_s = 0.0;
};

/// T(L) = T_{L=0} + L / c_f
double attempt_period_us(const TimingBudget& budget, double length_km, double fiber_speed_km_per_s);

/// R_max(L) = 1 / T(L)
double max_repetition_rate_hz(const TimingBudget& budget, double length_km, double fiber_speed_km_per_s);

/// r = phi * R * eta
RateResult entanglement_rate(const TimingBudget& budget, const link::LinkParams& params, double duty_cycle);

std::vector<RateResult> rate_sweep(const TimingBudget& budget, const link::LinkParams& params, double duty_cycle,
                                   std::span<const double> lengths_km);

} // namespace atomlink::rate
