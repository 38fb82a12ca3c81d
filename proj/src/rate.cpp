#include "atomlink/rate.hpp"

#include "atomlink/error.hpp"

namespace atomlink::rate {

void TimingBudget::validate() const {
    detail::require_non_negative(prep_us, "preparation time");
    detail::require_non_negative(entangle_us, "entanglement-generation time");
    detail::require_non_negative(raman_us, "Raman pulse time");
    detail::require_non_negative(cooling_us, "cooling time");
    if (attempts_per_cooling < 1) {
        throw ParameterError("attempts per cooling stage must be >= 1");
    }
}

double attempt_period_us(const TimingBudget& budget, double length_km, double fiber_speed_km_per_s) {
    budget.validate();
    return budget.zero_length_period_us() + link::travel_time_us(length_km, fiber_speed_km_per_s);
}

double max_repetition_rate_hz(const TimingBudget& budget, double length_km, double fiber_speed_km_per_s) {
    return 1e6 / attempt_period_us(budget, length_km, fiber_speed_km_per_s);
}

RateResult entanglement_rate(const TimingBudget& budget, const link::LinkParams& params, double duty_cycle) {
    detail::require_probability(duty_cycle, "duty cycle");
    RateResult out;
    out.length_km = params.length_km;
    out.period_us = attempt_period_us(budget, params.length_km, params.fiber_speed_km_per_s);
    out.repetition_hz = 1e6 / out.period_us;
    out.eta = link::signal_click_probability(params);
    out.rate_per_s = duty_cycle * out.repetition_hz * out.eta;
    return out;
}

std::vector<RateResult> rate_sweep(const TimingBudget& budget, const link::LinkParams& params, double duty_cycle,
                                   std::span<const double> lengths_km) {
    std::vector<RateResult> rows;
    rows.reserve(lengths_km.size());
    link::LinkParams probe = params;
    for (double length : lengths_km) {
        probe.length_km = length;
        rows.push_back(entanglement_rate(budget, probe, duty_cycle));
    }
    return rows;
}

} // namespace atomlink::rate
