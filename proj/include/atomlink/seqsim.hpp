#pragma once

// Event-driven Monte-Carlo of the experimental sequence: cooling stage, bursts
// of entanglement attempts, heralded readout. Time jumps from event to event;
// the attempts between two clicks are skipped with a geometric draw.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atomlink/analysis.hpp"
#include "atomlink/decoherence.hpp"
#include "atomlink/link.hpp"
#include "atomlink/qstate.hpp"
#include "atomlink/rate.hpp"
#include "atomlink/rng.hpp"

namespace atomlink::seqsim {

/// Imperfections applied to the heralded atom-photon state. Each field is one
/// line of the fidelity error budget.
struct SignalChannels {
    double entanglement_error = 0.011;      ///< uncorrelated admixture at emission
    double raman_efficiency = 0.975;        ///< per transfer, target state
    double raman_blocked_leak = 0.0;        ///< per transfer, blocked state
    bool decoherence = true;                ///< memory/initial-basis dephasing during storage
    double readout_timing_jitter_ns = 59.0; ///< rms timing error of the readout vs. Larmor phase
    double readout_error = 0.0235;          ///< symmetric flip of the atomic outcome
    double drift_dephasing = 1.0;           ///< static equatorial visibility factor
    double drift_white = 1.0;               ///< static isotropic visibility factor
    bool noise_clicks = true;               ///< conversion background and dark counts
    bool compensate_larmor = true;          ///< analysis angle follows the precession

    void validate() const;
};

struct ScheduledSetting {
    std::string label;
    qstate::MeasurementSetting setting;
    double weight = 1.0;
};

struct SequenceConfig {
    link::LinkParams link;
    rate::TimingBudget timing;
    int burst_length = 11;
    double pgc_us = 1000.0;
    double ramp_down_us = 1500.0;
    double field_stabilization_us = 4000.0;
    double ramp_back_us = 500.0;
    double readout_us = 10.0;
    double duty_cycle = 0.5;
    double pump_efficiency = 0.80;
    double excitation_efficiency = 0.90;
    double excited_lifetime_ns = 26.24;
    double b_gauss = 0.2445;
    zeeman::AtomicConstants constants{};
    decoherence::CoherenceModel memory{zeeman::QubitBasis::Memory, 6910.0, 1.0, 0.0};
    decoherence::CoherenceModel initial{zeeman::QubitBasis::Initial, 322.5, 1.0, 0.0};
    double initial_storage_us = 0.0;
    SignalChannels channels;
    std::vector<ScheduledSetting> schedule;
    std::uint64_t rng_seed = 1;
    unsigned threads = 1;

    void validate() const;

    double cooling_stage_us() const { return pgc_us + ramp_down_us + field_stabilization_us; }
    /// prep + excitation + transfer + photon flight to the detector
    double attempt_us() const;
    double storage_us() const;
};

/// Three-basis schedule (X, Y, Z correlated settings, equal weight).
std::vector<ScheduledSetting> three_basis_schedule();

enum class Truth { Signal, Qfc, Dark };

const char* to_string(Truth truth);

struct DetectionRecord {
    double time_us = 0.0;          ///< wall clock of the detection
    double readout_time_us = 0.0;  ///< wall clock of the atomic readout
    std::uint64_t attempt_index = 0;
    int setting = 0;
    int photon_port = 0;           ///< 0 = "+", 1 = "-"
    int atom_outcome = 0;          ///< +1, -1, or 0 for an atom outside the qubit
    Truth truth = Truth::Signal;
};

/// Joint counts indexed [photon port][atom +, -, leak].
struct OutcomeCounts {
    std::array<std::array<std::uint64_t, 3>, 2> n{};

    std::uint64_t total() const;
    analysis::SettingCounts same_different() const;
    void add(int photon_port, int atom_outcome);

    bool operator==(const OutcomeCounts&) const = default;
};

/// Everything the per-attempt sampler needs, precomputed from a config.
struct StateModel {
    qstate::AtomPhotonState signal_state = qstate::ideal_entangled_state();
    qstate::AtomPhotonState noise_state = qstate::ideal_entangled_state();
    link::ClickBreakdown clicks;
    double readout_error = 0.0;
    double storage_us = 0.0;
    double larmor_phase = 0.0;
};

StateModel build_state_model(const SequenceConfig& config);

/// Outcome distribution after the readout flip, signal and noise records kept apart.
qstate::OutcomeTable signal_outcomes(const StateModel& model, const qstate::MeasurementSetting& setting);
qstate::OutcomeTable noise_outcomes(const StateModel& model, const qstate::MeasurementSetting& setting);
/// Mixture weighted by the click breakdown.
qstate::OutcomeTable detected_outcomes(const StateModel& model, const qstate::MeasurementSetting& setting);

/// Per-attempt click probability (signal, or noise when no signal photon arrived).
double click_probability(const StateModel& model);
double noise_fraction(const StateModel& model);

/// One entanglement attempt. Times in the returned record are relative to the
/// start of the attempt; `attempt_index` is left for the caller.
std::optional<DetectionRecord> run_attempt(Rng& rng, const SequenceConfig& config, const StateModel& model,
                                           int setting_index);

struct StopCondition {
    std::optional<std::uint64_t> max_events;
    std::optional<double> max_hours;
};

struct RunSummary {
    std::vector<std::string> setting_labels;
    std::vector<OutcomeCounts> counts;
    std::uint64_t records = 0;
    std::uint64_t attempts = 0;
    std::uint64_t bursts = 0;
    std::array<std::uint64_t, 3> by_truth{};
    double active_us = 0.0;
    double wall_us = 0.0;
    double duty_cycle = 0.0;
    std::string generator;
    std::uint64_t seed = 0;

    bool operator==(const RunSummary&) const = default;
};

struct Campaign {
    RunSummary summary;
    std::vector<DetectionRecord> records;
};

Campaign run_campaign(const SequenceConfig& config, const StopCondition& stop);

/// Mean wall-clock time between heralds implied by the timeline (us).
double expected_event_interval_us(const SequenceConfig& config);

struct ScanCell {
    int photon_basis = 0;
    double atom_angle = 0.0;
    OutcomeCounts counts;
};

struct CorrelationScan {
    std::vector<qstate::PhotonBasis> photon_bases;
    std::vector<double> atom_angles;
    std::vector<ScanCell> cells;  ///< photon-basis major, angle minor
    RunSummary summary;
};

/// Atom angle 0 to 180 deg in 22.5 deg steps against photon H/V and D/A.
struct ScanPlan {
    std::vector<qstate::PhotonBasis> photon_bases;
    std::vector<double> atom_angles;

    static ScanPlan standard();
};

CorrelationScan simulate_correlation_scan(const SequenceConfig& config, const ScanPlan& plan,
                                          const StopCondition& stop);

struct FringeSummary {
    std::vector<analysis::FringeFit> fits;  ///< per (photon basis, port)
    double mean_visibility = 0.0;
    double mean_visibility_sigma = 0.0;
};

/// Fits P(atom + | photon port) versus atom angle for every basis and port.
FringeSummary fit_fringes(const CorrelationScan& scan);

/// CHSH from scan cells nearest to photon 0/45 deg and atom -22.5/+22.5 deg.
analysis::ChshEstimate chsh_from_scan(const CorrelationScan& scan);

/// Expected fringe visibility for a photon basis and port.
double predicted_fringe_visibility(const StateModel& model, const qstate::PhotonBasis& basis, int port);

struct ThreeBasisPrediction {
    double e_x = 0.0;
    double e_y = 0.0;
    double e_z = 0.0;

    double mean() const { return (e_x + e_y + e_z) / 3.0; }
    double fidelity_bound() const;
};

ThreeBasisPrediction predict_three_basis(const SequenceConfig& config);

/// Correlators estimated from a three-basis campaign (schedule order X, Y, Z).
ThreeBasisPrediction estimate_three_basis(const RunSummary& summary);

struct Attribution {
    analysis::ErrorBudget budget;  ///< visibility loss with one channel enabled at a time
    double full_fidelity = 0.0;    ///< all channels on
    double composed_fidelity = 0.0;
};

/// Switches channels on one at a time to split the three-basis visibility loss
/// into error-budget lines.
Attribution attribute_errors(const SequenceConfig& config);

} // namespace atomlink::seqsim
