#include "atomlink/seqsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "atomlink/error.hpp"

namespace atomlink::seqsim {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUsPerHour = 3.6e9;

using Flat = std::array<double, 6>;

Flat flatten(const qstate::OutcomeTable& t) {
    return {t.p[0][0], t.p[0][1], t.p[0][2], t.p[1][0], t.p[1][1], t.p[1][2]};
}

qstate::OutcomeTable apply_readout_flip(qstate::OutcomeTable t, double p) {
    for (auto& row : t.p) {
        const double plus = row[0];
        const double minus = row[1];
        row[0] = (1.0 - p) * plus + p * minus;
        row[1] = (1.0 - p) * minus + p * plus;
    }
    return t;
}

int atom_outcome_from_index(int idx) { return idx == 0 ? 1 : (idx == 1 ? -1 : 0); }

int atom_index_from_outcome(int outcome) { return outcome == 1 ? 0 : (outcome == -1 ? 1 : 2); }

double readout_timing_factor(const SequenceConfig& config) {
    const double f_khz = zeeman::larmor_frequency_khz(zeeman::QubitBasis::Initial, config.b_gauss, config.constants);
    const double phase_rms = 2.0 * kPi * f_khz * 1e-3 * config.channels.readout_timing_jitter_ns * 1e-3;
    return std::exp(-0.5 * phase_rms * phase_rms);
}

decoherence::CoherenceModel with_field(decoherence::CoherenceModel m, const SequenceConfig& config) {
    m.larmor_khz = zeeman::larmor_frequency_khz(m.basis, config.b_gauss, config.constants);
    return m;
}

qstate::AtomPhotonState store(const qstate::AtomPhotonState& state, const decoherence::CoherenceModel& model,
                              double t_us, bool compensate) {
    if (t_us <= 0.0) {
        return state;
    }
    auto out = decoherence::evolve(state, model, t_us);
    if (compensate) {
        out = qstate::apply_larmor(out, -decoherence::precession_phase(model, t_us));
    }
    return out;
}

// Detection offset inside an attempt window (us).
double sample_window_offset(Rng& rng, const SequenceConfig& config, Truth truth) {
    const double window = config.link.window_ns;
    if (truth != Truth::Signal) {
        return rng.uniform() * window * 1e-3;
    }
    const double tau = config.excited_lifetime_ns;
    const double accept = -std::expm1(-window / tau);
    return -tau * std::log1p(-rng.uniform() * accept) * 1e-3;
}

void sample_outcome(Rng& rng, const Flat& table, DetectionRecord& rec) {
    const auto idx = static_cast<int>(rng.categorical(table));
    rec.photon_port = idx / 3;
    rec.atom_outcome = atom_outcome_from_index(idx % 3);
}

std::size_t least_filled(const std::vector<ScheduledSetting>& schedule, const std::vector<std::uint64_t>& filled) {
    std::size_t best = 0;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const double ratio = static_cast<double>(filled[i]) / schedule[i].weight;
        if (ratio < best_ratio) {
            best_ratio = ratio;
            best = i;
        }
    }
    return best;
}

double detection_delay_us(const SequenceConfig& config) {
    return config.timing.prep_us + config.timing.entangle_us + config.storage_us();
}

} // namespace

void SignalChannels::validate() const {
    detail::require_probability(entanglement_error, "channels.entanglement_error");
    detail::require_probability(raman_efficiency, "channels.raman_efficiency");
    detail::require_probability(raman_blocked_leak, "channels.raman_blocked_leak");
    detail::require_non_negative(readout_timing_jitter_ns, "channels.readout_timing_jitter_ns");
    detail::require_probability(readout_error, "channels.readout_error");
    detail::require_probability(drift_dephasing, "channels.drift_dephasing");
    detail::require_probability(drift_white, "channels.drift_white");
}

void SequenceConfig::validate() const {
    link.validate();
    timing.validate();
    if (burst_length < 1) {
        throw ParameterError("burst_length must be >= 1");
    }
    for (const auto& [v, name] : {std::pair{pgc_us, "pgc_us"}, {ramp_down_us, "ramp_down_us"},
                                  {field_stabilization_us, "field_stabilization_us"}, {ramp_back_us, "ramp_back_us"},
                                  {readout_us, "readout_us"}, {initial_storage_us, "initial_storage_us"},
                                  {b_gauss, "b_gauss"}}) {
        if (!std::isfinite(v)) {
            throw ParameterError(std::string(name) + " must be finite");
        }
        detail::require_non_negative(v, name);
    }
    if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) {
        throw ParameterError("duty_cycle must lie in (0,1]");
    }
    if (!(pump_efficiency > 0.0 && pump_efficiency <= 1.0)) {
        throw ParameterError("pump_efficiency must lie in (0,1]");
    }
    if (!(excitation_efficiency > 0.0 && excitation_efficiency <= 1.0)) {
        throw ParameterError("excitation_efficiency must lie in (0,1]");
    }
    if (!(excited_lifetime_ns > 0.0)) {
        throw ParameterError("excited_lifetime_ns must be positive");
    }
    memory.validate();
    initial.validate();
    channels.validate();
    for (const auto& s : schedule) {
        if (!(s.weight > 0.0) || !std::isfinite(s.weight)) {
            throw ParameterError("schedule weight for '" + s.label + "' must be positive");
        }
    }
    if (threads < 1) {
        throw ParameterError("threads must be >= 1");
    }
    const double p_signal = link::signal_click_probability(link);
    if (p_signal > pump_efficiency * excitation_efficiency) {
        throw ParameterError("signal click probability exceeds pump x excitation efficiency");
    }
    const auto noise = link::noise_click_probability(link);
    if (noise.p_qfc + noise.p_dark > 1.0) {
        throw ParameterError("noise click probabilities sum above 1; shorten the window");
    }
}

double SequenceConfig::attempt_us() const {
    return timing.prep_us + timing.entangle_us + timing.raman_us + storage_us();
}

double SequenceConfig::storage_us() const { return link::travel_time_us(link.length_km, link.fiber_speed_km_per_s); }

std::vector<ScheduledSetting> three_basis_schedule() {
    using qstate::Basis;
    return {{"X", qstate::correlated_setting(Basis::X), 1.0},
            {"Y", qstate::correlated_setting(Basis::Y), 1.0},
            {"Z", qstate::correlated_setting(Basis::Z), 1.0}};
}

const char* to_string(Truth truth) {
    switch (truth) {
    case Truth::Signal:
        return "signal";
    case Truth::Qfc:
        return "qfc";
    case Truth::Dark:
        return "dark";
    }
    return "?";
}

std::uint64_t OutcomeCounts::total() const {
    std::uint64_t t = 0;
    for (const auto& row : n) {
        for (auto v : row) {
            t += v;
        }
    }
    return t;
}

analysis::SettingCounts OutcomeCounts::same_different() const {
    const std::uint64_t same = n[0][0] + n[1][1];
    return {same, total() - same};
}

void OutcomeCounts::add(int photon_port, int atom_outcome) {
    ++n[static_cast<std::size_t>(photon_port)][static_cast<std::size_t>(atom_index_from_outcome(atom_outcome))];
}

StateModel build_state_model(const SequenceConfig& config) {
    config.validate();
    const auto& ch = config.channels;
    StateModel m;
    m.clicks = link::click_breakdown(config.link);
    if (!ch.noise_clicks) {
        m.clicks.p_qfc = 0.0;
        m.clicks.p_dark = 0.0;
    }
    m.readout_error = ch.readout_error;
    m.storage_us = config.storage_us();

    auto rho = qstate::ideal_entangled_state();
    rho = qstate::mix_uncorrelated_noise(rho, ch.entanglement_error);
    rho = qstate::apply_transfer_loss(rho, ch.raman_efficiency, ch.raman_blocked_leak);
    if (ch.decoherence) {
        const auto mem = with_field(config.memory, config);
        const auto ini = with_field(config.initial, config);
        rho = store(rho, ini, config.initial_storage_us, ch.compensate_larmor);
        rho = store(rho, mem, m.storage_us, ch.compensate_larmor);
        if (!ch.compensate_larmor) {
            m.larmor_phase = decoherence::precession_phase(mem, m.storage_us) +
                             decoherence::precession_phase(ini, config.initial_storage_us);
        }
    }
    rho = qstate::apply_dephasing(rho, ch.drift_dephasing);
    rho = qstate::mix_uncorrelated_noise(rho, 1.0 - ch.drift_white);
    rho = qstate::apply_dephasing(rho, readout_timing_factor(config));
    rho = qstate::apply_transfer_loss(rho, ch.raman_efficiency, ch.raman_blocked_leak);
    m.signal_state = rho;
    m.noise_state = rho.atom_marginal_with_mixed_photon();
    return m;
}

qstate::OutcomeTable signal_outcomes(const StateModel& model, const qstate::MeasurementSetting& setting) {
    return apply_readout_flip(qstate::outcome_probabilities(model.signal_state, setting), model.readout_error);
}

qstate::OutcomeTable noise_outcomes(const StateModel& model, const qstate::MeasurementSetting& setting) {
    return apply_readout_flip(qstate::outcome_probabilities(model.noise_state, setting), model.readout_error);
}

double click_probability(const StateModel& model) {
    return model.clicks.p_signal + (1.0 - model.clicks.p_signal) * (model.clicks.p_qfc + model.clicks.p_dark);
}

double noise_fraction(const StateModel& model) {
    const double click = click_probability(model);
    if (click <= 0.0) {
        return 0.0;
    }
    return (1.0 - model.clicks.p_signal) * (model.clicks.p_qfc + model.clicks.p_dark) / click;
}

qstate::OutcomeTable detected_outcomes(const StateModel& model, const qstate::MeasurementSetting& setting) {
    const double f = noise_fraction(model);
    const auto s = signal_outcomes(model, setting);
    const auto n = noise_outcomes(model, setting);
    qstate::OutcomeTable out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 3; ++j) {
            out.p[i][j] = (1.0 - f) * s.p[i][j] + f * n.p[i][j];
        }
    }
    return out;
}

std::optional<DetectionRecord> run_attempt(Rng& rng, const SequenceConfig& config, const StateModel& model,
                                           int setting_index) {
    const auto& schedule = config.schedule;
    if (setting_index < 0 || static_cast<std::size_t>(setting_index) >= schedule.size()) {
        throw ParameterError("setting index outside the schedule");
    }
    const double p_emit = config.pump_efficiency * config.excitation_efficiency;
    bool signal = false;
    if (model.clicks.p_signal > 0.0 && rng.uniform() < p_emit) {
        signal = rng.uniform() < model.clicks.p_signal / p_emit;
    }
    Truth truth = Truth::Signal;
    if (!signal) {
        const double u = rng.uniform();
        if (u < model.clicks.p_qfc) {
            truth = Truth::Qfc;
        } else if (u < model.clicks.p_qfc + model.clicks.p_dark) {
            truth = Truth::Dark;
        } else {
            return std::nullopt;
        }
    }
    DetectionRecord rec;
    rec.truth = truth;
    rec.setting = setting_index;
    rec.time_us = detection_delay_us(config) + sample_window_offset(rng, config, truth);
    rec.readout_time_us = rec.time_us + config.timing.raman_us + config.readout_us;
    const auto& setting = schedule[static_cast<std::size_t>(setting_index)].setting;
    const auto table = truth == Truth::Signal ? signal_outcomes(model, setting) : noise_outcomes(model, setting);
    sample_outcome(rng, flatten(table), rec);
    return rec;
}

Campaign run_campaign(const SequenceConfig& config_in, const StopCondition& stop) {
    SequenceConfig config = config_in;
    if (config.schedule.empty()) {
        config.schedule = three_basis_schedule();
    }
    const StateModel model = build_state_model(config);
    if (!stop.max_events && !stop.max_hours) {
        throw ParameterError("campaign needs a stop condition");
    }
    if (stop.max_hours && !(*stop.max_hours >= 0.0)) {
        throw ParameterError("max_hours must be >= 0");
    }

    const auto n_settings = config.schedule.size();
    std::vector<Flat> signal_tables(n_settings);
    std::vector<Flat> noise_tables(n_settings);
    for (std::size_t i = 0; i < n_settings; ++i) {
        signal_tables[i] = flatten(signal_outcomes(model, config.schedule[i].setting));
        noise_tables[i] = flatten(noise_outcomes(model, config.schedule[i].setting));
    }

    Campaign out;
    auto& sum = out.summary;
    sum.duty_cycle = config.duty_cycle;
    sum.generator = std::string(Rng::generator_name());
    sum.seed = config.rng_seed;
    sum.counts.resize(n_settings);
    for (const auto& s : config.schedule) {
        sum.setting_labels.push_back(s.label);
    }

    const double p_click = click_probability(model);
    const auto n = static_cast<std::uint64_t>(config.burst_length);
    const double attempt = config.attempt_us();
    const double cooling = config.cooling_stage_us();
    const double failed_burst = static_cast<double>(n) * attempt + config.ramp_back_us + cooling;
    const double detect = detection_delay_us(config);
    const double tail = config.timing.raman_us + config.readout_us + config.ramp_back_us;
    const double wall_limit = stop.max_hours ? *stop.max_hours * kUsPerHour : std::numeric_limits<double>::infinity();
    const std::uint64_t max_events = stop.max_events.value_or(std::numeric_limits<std::uint64_t>::max());

    // Timeline pass: herald times and setting assignment only.
    Rng timeline(config.rng_seed, 0);
    std::vector<std::uint64_t> filled(n_settings, 0);
    double wall = 0.0;  // wall clock at the start of the current segment (cooling start)
    while (sum.records < max_events) {
        const double segment_start = wall;
        if (p_click <= 0.0 && !std::isfinite(wall_limit)) {
            break;  // nothing can ever click
        }
        const std::uint64_t k = p_click > 0.0 ? timeline.geometric(p_click) : std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t full = (k - 1) / n;
        const std::uint64_t j = (k - 1) % n;
        const double t_detect = segment_start + cooling + static_cast<double>(full) * failed_burst +
                                static_cast<double>(j) * attempt + detect;
        if (p_click <= 0.0 || t_detect > wall_limit) {
            // Count the attempts that fit before the limit, if there is one.
            if (std::isfinite(wall_limit)) {
                const double span = std::max(0.0, wall_limit - segment_start - cooling);
                const auto bursts = static_cast<std::uint64_t>(span / failed_burst);
                const double rest = span - static_cast<double>(bursts) * failed_burst;
                const auto partial = std::min<std::uint64_t>(n, static_cast<std::uint64_t>(rest / attempt));
                sum.attempts += bursts * n + partial;
                sum.bursts += bursts + (partial > 0 ? 1 : 0);
                sum.active_us += wall_limit - segment_start;
                wall = wall_limit;
            }
            break;
        }
        DetectionRecord rec;
        rec.attempt_index = sum.attempts + k - 1;
        rec.time_us = t_detect;
        const auto s = least_filled(config.schedule, filled);
        ++filled[s];
        rec.setting = static_cast<int>(s);
        out.records.push_back(rec);
        ++sum.records;
        sum.attempts += k;
        sum.bursts += full + 1;

        const double seg_active = (t_detect - segment_start) + tail;
        sum.active_us += seg_active;
        wall = segment_start + seg_active / config.duty_cycle;
    }
    sum.wall_us = wall;

    // Outcome pass: one derived substream per record, so any split of the
    // records across threads gives the same result.
    const Rng outcome_base(config.rng_seed, 1);
    const double p_s = model.clicks.p_signal;
    const std::array<double, 3> truth_w{p_s, (1.0 - p_s) * model.clicks.p_qfc, (1.0 - p_s) * model.clicks.p_dark};
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto& rec = out.records[i];
            Rng rng = outcome_base.derive(i);
            rec.truth = static_cast<Truth>(rng.categorical(truth_w));
            rec.time_us += sample_window_offset(rng, config, rec.truth);
            rec.readout_time_us = rec.time_us + config.timing.raman_us + config.readout_us;
            const auto s = static_cast<std::size_t>(rec.setting);
            sample_outcome(rng, rec.truth == Truth::Signal ? signal_tables[s] : noise_tables[s], rec);
        }
    };
    const std::size_t total = out.records.size();
    const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(total / 1024 + 1)));
    if (workers == 1) {
        work(0, total);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (total + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t b = std::min(total, w * chunk);
            const std::size_t e = std::min(total, b + chunk);
            pool.emplace_back(work, b, e);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& rec : out.records) {
        sum.counts[static_cast<std::size_t>(rec.setting)].add(rec.photon_port, rec.atom_outcome);
        ++sum.by_truth[static_cast<std::size_t>(rec.truth)];
    }
    return out;
}

double expected_event_interval_us(const SequenceConfig& config_in) {
    SequenceConfig config = config_in;
    if (config.schedule.empty()) {
        config.schedule = three_basis_schedule();
    }
    const StateModel model = build_state_model(config);
    const double p = click_probability(model);
    if (p <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const int n = config.burst_length;
    const double log_q = std::log1p(-p);
    const double miss_burst = std::exp(n * log_q);      // q^n
    const double hit_burst = -std::expm1(n * log_q);    // 1 - q^n
    const double mean_failed = miss_burst / hit_burst;
    double mean_j = 0.0;
    for (int j = 0; j < n; ++j) {
        mean_j += j * p * std::exp(j * log_q);
    }
    mean_j /= hit_burst;
    const double failed_burst = n * config.attempt_us() + config.ramp_back_us + config.cooling_stage_us();
    const double active = config.cooling_stage_us() + mean_failed * failed_burst + mean_j * config.attempt_us() +
                          detection_delay_us(config) + config.timing.raman_us + config.readout_us + config.ramp_back_us;
    return active / config.duty_cycle;
}

ScanPlan ScanPlan::standard() {
    ScanPlan plan;
    plan.photon_bases = {qstate::PhotonBasis::linear(0.0), qstate::PhotonBasis::linear(kPi / 4.0)};
    for (int k = 0; k <= 8; ++k) {
        plan.atom_angles.push_back(k * kPi / 8.0);
    }
    return plan;
}

CorrelationScan simulate_correlation_scan(const SequenceConfig& config, const ScanPlan& plan,
                                          const StopCondition& stop) {
    if (plan.photon_bases.empty() || plan.atom_angles.empty()) {
        throw ParameterError("scan plan needs at least one photon basis and one atom angle");
    }
    SequenceConfig cfg = config;
    cfg.schedule.clear();
    for (std::size_t b = 0; b < plan.photon_bases.size(); ++b) {
        for (double angle : plan.atom_angles) {
            ScheduledSetting s;
            s.label = "photon" + std::to_string(b) + "@" + std::to_string(angle * 180.0 / kPi);
            s.setting = {plan.photon_bases[b], qstate::AtomBasis::linear(angle)};
            cfg.schedule.push_back(s);
        }
    }
    auto campaign = run_campaign(cfg, stop);
    CorrelationScan scan;
    scan.photon_bases = plan.photon_bases;
    scan.atom_angles = plan.atom_angles;
    std::size_t i = 0;
    for (std::size_t b = 0; b < plan.photon_bases.size(); ++b) {
        for (double angle : plan.atom_angles) {
            scan.cells.push_back({static_cast<int>(b), angle, campaign.summary.counts[i++]});
        }
    }
    scan.summary = std::move(campaign.summary);
    return scan;
}

FringeSummary fit_fringes(const CorrelationScan& scan) {
    FringeSummary out;
    double var = 0.0;
    for (std::size_t b = 0; b < scan.photon_bases.size(); ++b) {
        for (int port = 0; port < 2; ++port) {
            std::vector<analysis::FitPoint> pts;
            for (const auto& cell : scan.cells) {
                if (cell.photon_basis != static_cast<int>(b)) {
                    continue;
                }
                const auto& row = cell.counts.n[static_cast<std::size_t>(port)];
                const auto total = row[0] + row[1] + row[2];
                if (total == 0) {
                    continue;
                }
                pts.push_back({cell.atom_angle, static_cast<double>(row[0]) / static_cast<double>(total), 0.0});
            }
            const auto fit = analysis::fit_sinusoid(pts);
            out.fits.push_back(fit);
            out.mean_visibility += fit.visibility;
            var += fit.sigma_visibility * fit.sigma_visibility;
        }
    }
    const double nf = static_cast<double>(out.fits.size());
    out.mean_visibility /= nf;
    out.mean_visibility_sigma = std::sqrt(var) / nf;
    return out;
}

analysis::ChshEstimate chsh_from_scan(const CorrelationScan& scan) {
    auto find_basis = [&](double theta) {
        const auto target = qstate::PhotonBasis::linear(theta).direction;
        for (std::size_t b = 0; b < scan.photon_bases.size(); ++b) {
            const auto d = scan.photon_bases[b].direction;
            if (std::abs(d.polar - target.polar) < 1e-9 &&
                std::abs(std::remainder(d.azimuth - target.azimuth, 2.0 * kPi)) < 1e-9) {
                return static_cast<int>(b);
            }
        }
        throw ParameterError("scan lacks the photon basis needed for CHSH");
    };
    auto find_cell = [&](int basis, double angle) -> const OutcomeCounts& {
        for (const auto& cell : scan.cells) {
            if (cell.photon_basis == basis && std::abs(std::remainder(cell.atom_angle - angle, kPi)) < 1e-9) {
                return cell.counts;
            }
        }
        throw ParameterError("scan lacks the atom angle needed for CHSH");
    };
    const int b = find_basis(0.0);
    const int bp = find_basis(kPi / 4.0);
    const double a = -kPi / 8.0;
    const double ap = kPi / 8.0;
    const std::array<analysis::SettingCounts, 4> counts{
        find_cell(b, a).same_different(), find_cell(bp, a).same_different(), find_cell(b, ap).same_different(),
        find_cell(bp, ap).same_different()};
    return analysis::chsh_from_counts(counts);
}

double predicted_fringe_visibility(const StateModel& model, const qstate::PhotonBasis& basis, int port) {
    auto p_plus = [&](double theta) {
        const auto t = detected_outcomes(model, {basis, qstate::AtomBasis::linear(theta)});
        const auto& row = t.p[static_cast<std::size_t>(port)];
        return row[0] / (row[0] + row[1] + row[2]);
    };
    const double p0 = p_plus(0.0);
    const double p45 = p_plus(kPi / 4.0);
    const double p90 = p_plus(kPi / 2.0);
    const double offset = 0.5 * (p0 + p90);
    return std::hypot(0.5 * (p0 - p90), p45 - offset) / offset;
}

double ThreeBasisPrediction::fidelity_bound() const {
    return analysis::fidelity_lower_bound(std::clamp(mean(), -1.0, 1.0));
}

ThreeBasisPrediction predict_three_basis(const SequenceConfig& config) {
    const auto model = build_state_model(config);
    using qstate::Basis;
    return {detected_outcomes(model, qstate::correlated_setting(Basis::X)).correlator(),
            detected_outcomes(model, qstate::correlated_setting(Basis::Y)).correlator(),
            detected_outcomes(model, qstate::correlated_setting(Basis::Z)).correlator()};
}

ThreeBasisPrediction estimate_three_basis(const RunSummary& summary) {
    if (summary.counts.size() < 3) {
        throw ParameterError("three-basis estimate needs X, Y and Z settings");
    }
    return {analysis::correlator_from_counts(summary.counts[0].same_different()).value,
            analysis::correlator_from_counts(summary.counts[1].same_different()).value,
            analysis::correlator_from_counts(summary.counts[2].same_different()).value};
}

Attribution attribute_errors(const SequenceConfig& config) {
    SignalChannels off = config.channels;
    off.entanglement_error = 0.0;
    off.raman_efficiency = 1.0;
    off.raman_blocked_leak = 0.0;
    off.decoherence = false;
    off.readout_timing_jitter_ns = 0.0;
    off.readout_error = 0.0;
    off.drift_dephasing = 1.0;
    off.drift_white = 1.0;
    off.noise_clicks = false;

    const auto& on = config.channels;
    auto loss_with = [&](auto enable) {
        SequenceConfig c = config;
        c.channels = off;
        enable(c.channels);
        return std::clamp(1.0 - predict_three_basis(c).mean(), 0.0, 1.0);
    };

    Attribution out;
    auto& b = out.budget;
    b.snr_readout = loss_with([&](SignalChannels& c) { c.noise_clicks = on.noise_clicks; });
    b.decoherence = loss_with([&](SignalChannels& c) { c.decoherence = on.decoherence; });
    b.raman_transfers = loss_with([&](SignalChannels& c) {
        c.raman_efficiency = on.raman_efficiency;
        c.raman_blocked_leak = on.raman_blocked_leak;
    });
    b.readout = loss_with([&](SignalChannels& c) { c.readout_error = on.readout_error; });
    b.entanglement_generation = loss_with([&](SignalChannels& c) { c.entanglement_error = on.entanglement_error; });
    b.readout_timing = loss_with([&](SignalChannels& c) { c.readout_timing_jitter_ns = on.readout_timing_jitter_ns; });
    b.drifts = loss_with([&](SignalChannels& c) {
        c.drift_dephasing = on.drift_dephasing;
        c.drift_white = on.drift_white;
    });
    out.full_fidelity = predict_three_basis(config).fidelity_bound();
    out.composed_fidelity = analysis::compose_error_budget(b);
    return out;
}

} // namespace atomlink::seqsim
