#include "properties.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "atomlink/decoherence.hpp"
#include "atomlink/link.hpp"
#include "atomlink/qstate.hpp"
#include "atomlink/rate.hpp"
#include "atomlink/seqsim.hpp"
#include "oracles.hpp"

namespace properties {
namespace {

using atomlink::qstate::AtomPhotonState;
using atomlink::qstate::Matrix6;

constexpr double kPi = std::numbers::pi;

double uniform(std::mt19937_64& gen, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
}

double max_diff(const Matrix6& a, const Matrix6& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::string describe(int c, const char* what, double value) {
    std::ostringstream os;
    os << "case " << c << ": " << what << " (" << value << ")";
    return os.str();
}

// Physicality checked independently of the constructor.
bool physical(const Matrix6& rho) {
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 || (rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Matrix6> es(rho);
    return es.eigenvalues().minCoeff() > -1e-10;
}

atomlink::seqsim::SignalChannels random_channels(std::mt19937_64& gen) {
    atomlink::seqsim::SignalChannels ch;
    ch.entanglement_error = uniform(gen, 0.0, 0.2);
    ch.raman_efficiency = uniform(gen, 0.8, 1.0);
    ch.raman_blocked_leak = uniform(gen, 0.0, 0.05);
    ch.decoherence = gen() % 2 == 0;
    ch.readout_timing_jitter_ns = uniform(gen, 0.0, 200.0);
    ch.readout_error = uniform(gen, 0.0, 0.1);
    ch.drift_dephasing = uniform(gen, 0.7, 1.0);
    ch.drift_white = uniform(gen, 0.7, 1.0);
    ch.noise_clicks = gen() % 4 != 0;
    ch.compensate_larmor = gen() % 2 == 0;
    return ch;
}

} // namespace

void Result::fail(const std::string& what) {
    if (failures == 0) {
        first_failure = what;
    }
    ++failures;
}

Result qstate_channels(int n, std::uint64_t seed) {
    namespace qs = atomlink::qstate;
    std::mt19937_64 gen(seed);
    Result r;
    for (int c = 0; c < n; ++c, ++r.cases) {
        const int rank = 1 + static_cast<int>(gen() % 6);
        const Matrix6 rho = oracle::random_density(gen, rank);
        const AtomPhotonState state(rho);
        const double v1 = uniform(gen, 0.0, 1.0);
        const double v2 = uniform(gen, 0.0, 1.0);
        const double phi1 = uniform(gen, -10.0, 10.0);
        const double phi2 = uniform(gen, -10.0, 10.0);
        const double eta1 = uniform(gen, 0.0, 1.0);
        const double eta2 = uniform(gen, 0.0, 1.0);
        const double b1 = uniform(gen, 0.0, 1.0);
        const double b2 = uniform(gen, 0.0, 1.0);
        const double p1 = uniform(gen, 0.0, 1.0);
        const double p2 = uniform(gen, 0.0, 1.0);

        const auto deph = qs::apply_dephasing(state, v1);
        const auto lar = qs::apply_larmor(state, phi1);
        const auto loss = qs::apply_transfer_loss(state, eta1, b1);
        const auto mix = qs::mix_uncorrelated_noise(state, p1);
        const auto marg = state.atom_marginal_with_mixed_photon();
        for (const auto* out : {&deph, &lar, &loss, &mix, &marg}) {
            if (!physical(out->rho())) {
                r.fail(describe(c, "unphysical channel output", out->min_eigenvalue()));
            }
        }
        if (const double d = max_diff(deph.rho(), oracle::dephasing(rho, v1)); d > 1e-12) {
            r.fail(describe(c, "dephasing differs from Kraus oracle", d));
        }
        if (const double d = max_diff(lar.rho(), oracle::larmor(rho, phi1)); d > 1e-12) {
            r.fail(describe(c, "Larmor rotation differs from unitary oracle", d));
        }
        if (const double d = max_diff(loss.rho(), oracle::transfer_loss(rho, eta1, b1)); d > 1e-12) {
            r.fail(describe(c, "transfer loss differs from Kraus oracle", d));
        }
        if (const double d = max_diff(mix.rho(), oracle::uncorrelated_noise(rho, p1)); d > 1e-12) {
            r.fail(describe(c, "noise mixing differs from partial-trace oracle", d));
        }

        // Semigroup composition.
        if (const double d = max_diff(qs::apply_dephasing(deph, v2).rho(), qs::apply_dephasing(state, v1 * v2).rho());
            d > 1e-12) {
            r.fail(describe(c, "dephasing does not compose", d));
        }
        if (const double d = max_diff(qs::apply_larmor(lar, phi2).rho(), qs::apply_larmor(state, phi1 + phi2).rho());
            d > 1e-12) {
            r.fail(describe(c, "Larmor rotations do not compose", d));
        }
        if (const double d = max_diff(qs::apply_transfer_loss(loss, eta2, b2).rho(),
                                      qs::apply_transfer_loss(state, eta1 * eta2, 1.0 - (1.0 - b1) * (1.0 - b2)).rho());
            d > 1e-12) {
            r.fail(describe(c, "transfer loss does not compose", d));
        }
        if (const double d = max_diff(qs::mix_uncorrelated_noise(mix, p2).rho(),
                                      qs::mix_uncorrelated_noise(state, 1.0 - (1.0 - p1) * (1.0 - p2)).rho());
            d > 1e-12) {
            r.fail(describe(c, "noise mixing does not compose", d));
        }
        atomlink::decoherence::CoherenceModel model;
        model.t2_us = uniform(gen, 10.0, 10000.0);
        model.larmor_khz = uniform(gen, -500.0, 500.0);
        const double t1 = uniform(gen, 0.0, 5000.0);
        const double t2 = uniform(gen, 0.0, 5000.0);
        const auto stepwise = atomlink::decoherence::evolve(atomlink::decoherence::evolve(state, model, t1), model, t2);
        const auto direct = atomlink::decoherence::evolve(state, model, t1 + t2);
        if (const double d = max_diff(stepwise.rho(), direct.rho()); d > 1e-10) {
            r.fail(describe(c, "storage evolution does not compose", d));
        }

        // Correlators against Pauli operators.
        qs::MeasurementSetting s;
        s.atom.direction = {uniform(gen, 0.0, kPi), uniform(gen, -kPi, kPi)};
        s.photon.direction = {uniform(gen, 0.0, kPi), uniform(gen, -kPi, kPi)};
        const auto table = qs::outcome_probabilities(state, s);
        double total = 0.0;
        for (const auto& row : table.p) {
            for (double p : row) {
                total += p;
            }
        }
        if (std::abs(total - 1.0) > 1e-12) {
            r.fail(describe(c, "outcome probabilities do not sum to one", total));
        }
        const double e_oracle = oracle::correlator(rho, s.atom.direction.polar, s.atom.direction.azimuth,
                                                   s.photon.direction.polar, s.photon.direction.azimuth);
        if (const double d = std::abs(table.correlator() - e_oracle); d > 1e-12) {
            r.fail(describe(c, "correlator differs from Pauli oracle", d));
        }
    }
    return r;
}

Result link_monotonicity(int n, std::uint64_t seed) {
    namespace lk = atomlink::link;
    std::mt19937_64 gen(seed);
    Result r;
    for (int c = 0; c < n; ++c, ++r.cases) {
        lk::LinkParams p;
        p.attenuation_db_per_km = uniform(gen, 0.01, 1.0);
        p.fiber_speed_km_per_s = uniform(gen, 1.5e5, 3e5);
        p.eta_collect = uniform(gen, 1e-3, 1.0);
        p.eta_qfc = uniform(gen, 0.1, 1.0);
        p.eta_detector = uniform(gen, 0.1, 0.9);
        p.dark_count_cps = uniform(gen, 0.0, 100.0);
        p.qfc_background_cps = uniform(gen, 0.0, 1000.0);
        p.window_ns = uniform(gen, 1.0, 200.0);
        p.window_fraction = uniform(gen, 0.1, 1.0);
        if (p.dark_count_cps + p.qfc_background_cps == 0.0) {
            p.dark_count_cps = 1.0;
        }
        atomlink::rate::TimingBudget budget;
        const double duty = uniform(gen, 0.05, 1.0);

        double l1 = uniform(gen, 0.0, 200.0);
        double l2 = uniform(gen, 0.0, 200.0);
        if (l1 > l2) {
            std::swap(l1, l2);
        }
        lk::LinkParams a = p;
        lk::LinkParams b = p;
        a.length_km = l1;
        b.length_km = l2;
        if (lk::signal_click_probability(a) < lk::signal_click_probability(b)) {
            r.fail(describe(c, "signal probability grows with length", l2 - l1));
        }
        if (lk::snr(a) < lk::snr(b) * (1.0 - 1e-12)) {
            r.fail(describe(c, "SNR grows with length", l2 - l1));
        }
        if (lk::noise_click_probability(a).p_qfc < lk::noise_click_probability(b).p_qfc) {
            r.fail(describe(c, "conversion background grows with length", l2 - l1));
        }
        if (lk::travel_time_us(l1, p.fiber_speed_km_per_s) > lk::travel_time_us(l2, p.fiber_speed_km_per_s)) {
            r.fail(describe(c, "travel time shrinks with length", l2 - l1));
        }
        if (atomlink::rate::attempt_period_us(budget, l1, p.fiber_speed_km_per_s) >
            atomlink::rate::attempt_period_us(budget, l2, p.fiber_speed_km_per_s)) {
            r.fail(describe(c, "attempt period shrinks with length", l2 - l1));
        }
        if (atomlink::rate::entanglement_rate(budget, a, duty).rate_per_s <
            atomlink::rate::entanglement_rate(budget, b, duty).rate_per_s) {
            r.fail(describe(c, "entanglement rate grows with length", l2 - l1));
        }
        // More efficient hardware never hurts.
        lk::LinkParams better = a;
        better.eta_detector = std::min(1.0, a.eta_detector * uniform(gen, 1.0, 1.5));
        if (lk::signal_click_probability(better) < lk::signal_click_probability(a)) {
            r.fail(describe(c, "signal probability falls with detector efficiency", better.eta_detector));
        }
        lk::LinkParams noisier = a;
        noisier.dark_count_cps += uniform(gen, 0.0, 10.0);
        if (lk::snr(noisier) > lk::snr(a)) {
            r.fail(describe(c, "SNR grows with dark counts", noisier.dark_count_cps));
        }
    }
    return r;
}

namespace {

bool same_records(const std::vector<atomlink::seqsim::DetectionRecord>& a,
                  const std::vector<atomlink::seqsim::DetectionRecord>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& x = a[i];
        const auto& y = b[i];
        if (x.time_us != y.time_us || x.readout_time_us != y.readout_time_us || x.attempt_index != y.attempt_index ||
            x.setting != y.setting || x.photon_port != y.photon_port || x.atom_outcome != y.atom_outcome ||
            x.truth != y.truth) {
            return false;
        }
    }
    return true;
}

atomlink::seqsim::SequenceConfig random_sequence(std::mt19937_64& gen) {
    atomlink::seqsim::SequenceConfig cfg;
    cfg.link.length_km = uniform(gen, 0.0, 101.0);
    cfg.link.eta_collect = uniform(gen, 0.005, 0.5);
    cfg.link.dark_count_cps = uniform(gen, 0.0, 50.0);
    cfg.link.qfc_background_cps = uniform(gen, 0.0, 500.0);
    cfg.b_gauss = uniform(gen, 0.0, 0.5);
    cfg.burst_length = 1 + static_cast<int>(gen() % 20);
    cfg.duty_cycle = uniform(gen, 0.1, 1.0);
    cfg.initial_storage_us = uniform(gen, 0.0, 50.0);
    cfg.channels = random_channels(gen);
    cfg.schedule = atomlink::seqsim::three_basis_schedule();
    cfg.rng_seed = gen();
    return cfg;
}

} // namespace

Result seqsim_determinism(int n, std::uint64_t seed) {
    namespace sq = atomlink::seqsim;
    std::mt19937_64 gen(seed);
    Result r;
    for (int c = 0; c < n; ++c, ++r.cases) {
        auto cfg = random_sequence(gen);
        // Every 50th case is long enough to be split across threads.
        const std::uint64_t events = c % 50 == 0 ? 3000 : 1 + gen() % 40;
        const sq::StopCondition stop{events, std::nullopt};
        cfg.threads = 1;
        const auto first = sq::run_campaign(cfg, stop);
        const auto second = sq::run_campaign(cfg, stop);
        cfg.threads = 4;
        const auto threaded = sq::run_campaign(cfg, stop);
        if (!(first.summary == second.summary) || !same_records(first.records, second.records)) {
            r.fail(describe(c, "rerun with the same seed differs", static_cast<double>(events)));
        }
        if (!(first.summary == threaded.summary) || !same_records(first.records, threaded.records)) {
            r.fail(describe(c, "threaded run differs", static_cast<double>(events)));
        }
        if (first.summary.records != events) {
            r.fail(describe(c, "event stop not honored", static_cast<double>(first.summary.records)));
        }
        cfg.rng_seed ^= 0x9e3779b97f4a7c15ULL;
        const auto other = sq::run_campaign(cfg, stop);
        if (events > 5 && same_records(first.records, other.records)) {
            r.fail(describe(c, "different seeds give identical records", static_cast<double>(events)));
        }
    }
    return r;
}

Result seqsim_convergence(int n, std::uint64_t seed, std::uint64_t attempts_per_case) {
    namespace sq = atomlink::seqsim;
    std::mt19937_64 gen(seed);
    Result r;
    for (int c = 0; c < n; ++c, ++r.cases) {
        auto cfg = random_sequence(gen);
        // Short, efficient links so every case has enough clicks to test.
        cfg.link.length_km = uniform(gen, 0.0, 20.0);
        cfg.link.eta_collect = uniform(gen, 0.3, 1.0);
        cfg.link.eta_qfc = uniform(gen, 0.5, 1.0);
        cfg.pump_efficiency = 1.0;
        cfg.excitation_efficiency = 1.0;
        const auto model = sq::build_state_model(cfg);
        atomlink::Rng rng(cfg.rng_seed, 7);
        const int setting = static_cast<int>(gen() % cfg.schedule.size());
        std::uint64_t clicks = 0;
        std::uint64_t same = 0;
        std::uint64_t signal = 0;
        for (std::uint64_t k = 0; k < attempts_per_case; ++k) {
            const auto rec = sq::run_attempt(rng, cfg, model, setting);
            if (!rec) {
                continue;
            }
            ++clicks;
            signal += rec->truth == sq::Truth::Signal ? 1 : 0;
            // photon port "+" is 0, atom "+" is +1
            same += (rec->photon_port == 0) == (rec->atom_outcome == 1) && rec->atom_outcome != 0 ? 1 : 0;
        }
        auto within = [](double k, double trials, double p) {
            const double sigma = std::sqrt(trials * p * (1.0 - p));
            return std::abs(k - trials * p) <= 5.0 * sigma + 1.0;
        };
        const double nt = static_cast<double>(attempts_per_case);
        const double p_click = sq::click_probability(model);
        if (!within(static_cast<double>(clicks), nt, p_click)) {
            r.fail(describe(c, "click frequency off by more than 5 sigma", static_cast<double>(clicks) / nt - p_click));
        }
        if (clicks == 0) {
            continue;
        }
        const double nc = static_cast<double>(clicks);
        if (!within(static_cast<double>(signal), nc, 1.0 - sq::noise_fraction(model))) {
            r.fail(describe(c, "signal fraction off by more than 5 sigma", static_cast<double>(signal) / nc));
        }
        const auto table = sq::detected_outcomes(model, cfg.schedule[static_cast<std::size_t>(setting)].setting);
        if (!within(static_cast<double>(same), nc, table.same())) {
            r.fail(describe(c, "correlation frequency off by more than 5 sigma", static_cast<double>(same) / nc));
        }
    }
    return r;
}

} // namespace properties
