#include "atomlink/decoherence.hpp"

#include <cmath>
#include <numbers>

#include "atomlink/error.hpp"

namespace atomlink::decoherence {

void CoherenceModel::validate() const {
    if (!(t2_us > 0.0)) {
        throw ParameterError("T2 must be positive");
    }
    detail::require_probability(v0, "initial visibility V0");
    if (!std::isfinite(larmor_khz)) {
        throw ParameterError("Larmor frequency must be finite");
    }
}

CoherenceModel make_model(zeeman::QubitBasis basis, double t2_us, double v0, double b_gauss,
                          const zeeman::AtomicConstants& constants) {
    CoherenceModel model;
    model.basis = basis;
    model.t2_us = t2_us;
    model.v0 = v0;
    model.larmor_khz = zeeman::larmor_frequency_khz(basis, b_gauss, constants);
    model.validate();
    return model;
}

double decay_factor(const CoherenceModel& model, double t_us) {
    model.validate();
    detail::require_non_negative(t_us, "storage time");
    const double r = t_us / model.t2_us;
    return model.shape == DecayShape::Exponential ? std::exp(-r) : std::exp(-r * r);
}

double visibility_at(const CoherenceModel& model, double t_us) { return model.v0 * decay_factor(model, t_us); }

double precession_phase(const CoherenceModel& model, double t_us) {
    detail::require_non_negative(t_us, "storage time");
    // kHz * us = 1e-3 cycles
    return 2.0 * std::numbers::pi * model.larmor_khz * 1e-3 * t_us;
}

qstate::AtomPhotonState evolve(const qstate::AtomPhotonState& state, const CoherenceModel& model, double t_us) {
    const auto dephased = qstate::apply_dephasing(state, decay_factor(model, t_us));
    return qstate::apply_larmor(dephased, precession_phase(model, t_us));
}

} // namespace atomlink::decoherence
