#pragma once

#include "atomlink/qstate.hpp"
#include "atomlink/zeeman.hpp"

namespace atomlink::decoherence {

enum class DecayShape { Exponential, Gaussian };

struct CoherenceModel {
    zeeman::QubitBasis basis = zeeman::QubitBasis::Memory;
    double t2_us = 6910.0;
    double v0 = 1.0;
    double larmor_khz = 0.0;
    DecayShape shape = DecayShape::Exponential;

    void validate() const;
};

/// Model whose Larmor frequency is taken from the Breit-Rabi structure at b_gauss.
CoherenceModel make_model(zeeman::QubitBasis basis, double t2_us, double v0, double b_gauss,
                          const zeeman::AtomicConstants& constants = zeeman::default_constants());

/// V0 * exp(-t/T2) (or the Gaussian variant).
double visibility_at(const CoherenceModel& model, double t_us);

/// Decay factor relative to V0.
double decay_factor(const CoherenceModel& model, double t_us);

/// 2 pi f_L t.
double precession_phase(const CoherenceModel& model, double t_us);

qstate::AtomPhotonState evolve(const qstate::AtomPhotonState& state, const CoherenceModel& model, double t_us);

} // namespace atomlink::decoherence
