// atomlink: rate / SNR sweeps, Raman spectra, sequence simulation,
// coherence scans and offline analysis of record logs.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "atomlink/analysis.hpp"
#include "atomlink/coherence_scan.hpp"
#include "atomlink/config.hpp"
#include "atomlink/error.hpp"
#include "atomlink/link.hpp"
#include "atomlink/raman.hpp"
#include "atomlink/rate.hpp"
#include "atomlink/report.hpp"
#include "atomlink/seqsim.hpp"

namespace {

using namespace atomlink;
using nlohmann::ordered_json;
using report::Cell;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Common {
    std::string config_path;
    std::string preset = "paper-101km";
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
};

struct RangeOpts {
    std::optional<double> from_km;
    std::optional<double> to_km;
    std::optional<double> step_km;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "Scenario file (YAML)");
    sub->add_option("--preset", c.preset, "Named preset, searched in $ATOMLINK_CONFIG_DIR")->capture_default_str();
    sub->add_option("--seed", c.seed, "RNG seed override");
    sub->add_option("--out", c.out, "Output file (default: stdout)");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void add_range(CLI::App* sub, RangeOpts& r) {
    sub->add_option("--from-km", r.from_km, "First fiber length");
    sub->add_option("--to-km", r.to_km, "Last fiber length");
    sub->add_option("--step-km", r.step_km, "Length step");
}

config::ScenarioConfig load(const Common& c) {
    auto cfg = c.config_path.empty() ? config::load_scenario(config::find_preset(c.preset))
                                     : config::load_scenario(c.config_path);
    if (c.seed) {
        cfg.simulate.seed = *c.seed;
        cfg.sequence.rng_seed = *c.seed;
    }
    return cfg;
}

std::vector<double> lengths(config::ScenarioConfig& cfg, const RangeOpts& r) {
    if (r.from_km) {
        cfg.sweep.start_km = *r.from_km;
    }
    if (r.to_km) {
        cfg.sweep.stop_km = *r.to_km;
    }
    if (r.step_km) {
        cfg.sweep.step_km = *r.step_km;
    }
    return cfg.sweep.lengths();
}

// Output sink: a file when --out is given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw std::runtime_error("cannot write " + path);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(report::format_number(v)); }

// Table output shared by the sweep-style commands.
void emit_table(const Common& common, const config::ScenarioConfig& cfg, const std::vector<std::string>& columns,
                const std::vector<std::vector<Cell>>& rows, const ordered_json& extra = ordered_json::object()) {
    Sink sink(common.out);
    auto& os = sink.stream();
    const auto echo = config::to_json_text(cfg);
    if (common.format == "csv") {
        std::string comment = echo;
        for (const auto& [k, v] : extra.items()) {
            comment += "\n" + k + ": " + v.dump();
        }
        report::CsvWriter w(os, columns, comment);
        for (const auto& r : rows) {
            w.row(r);
        }
        return;
    }
    ordered_json doc;
    doc["config"] = ordered_json::parse(echo);
    for (const auto& [k, v] : extra.items()) {
        doc[k] = v;
    }
    auto& arr = doc["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json row;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        row[columns[i]] = number(v);
                    } else {
                        row[columns[i]] = v;
                    }
                },
                r[i]);
        }
        arr.push_back(row);
    }
    os << doc.dump(2) << '\n';
}

int cmd_rate(const Common& common, const RangeOpts& range) {
    auto cfg = load(common);
    const auto ls = lengths(cfg, range);
    std::vector<std::vector<Cell>> rows;
    for (const auto& r : rate::rate_sweep(cfg.timing, cfg.link, cfg.duty_cycle, ls)) {
        rows.push_back({r.length_km, link::fiber_transmission(r.length_km, cfg.link.attenuation_db_per_km),
                        r.period_us, r.repetition_hz, r.eta, r.rate_per_s});
    }
    emit_table(common, cfg, {"length_km", "transmission", "period_us", "repetition_hz", "eta", "rate_per_s"}, rows);
    return 0;
}

int cmd_snr(const Common& common, const RangeOpts& range, std::optional<double> dark_counts) {
    auto cfg = load(common);
    if (dark_counts) {
        cfg.link.dark_count_cps = *dark_counts;
        cfg.sequence.link = cfg.link;
        cfg.validate();
    }
    const auto ls = lengths(cfg, range);
    std::vector<std::vector<Cell>> rows;
    for (const auto& r : link::snr_sweep(cfg.link, ls)) {
        rows.push_back({r.length_km, r.clicks.p_signal, r.clicks.p_qfc, r.clicks.p_dark, r.snr});
    }
    ordered_json extra;
    extra["noise_crossover_km"] = number(link::noise_crossover_km(cfg.link));
    emit_table(common, cfg, {"length_km", "p_signal", "p_qfc", "p_dark", "snr"}, rows, extra);
    return 0;
}

int cmd_raman(const Common& common, std::optional<double> b_gauss, std::optional<double> dmin,
              std::optional<double> dmax, std::optional<int> points) {
    auto cfg = load(common);
    auto rc = cfg.raman;
    if (b_gauss) {
        rc.b_gauss = *b_gauss;
        rc.two_photon_detuning = raman::delta_three_level(rc);
    }
    const double lo = dmin.value_or(cfg.raman_scan.delta_min_khz);
    const double hi = dmax.value_or(cfg.raman_scan.delta_max_khz);
    const int n = points.value_or(cfg.raman_scan.n_points);
    if (n < 2 || !(hi > lo)) {
        throw ConfigError("raman scan: need at least 2 points and an increasing range");
    }
    const auto spectrum = raman::transfer_spectrum(rc, kTwoPi * lo * 1e-3, kTwoPi * hi * 1e-3, n);
    std::vector<std::vector<Cell>> rows;
    for (const auto& p : spectrum) {
        rows.push_back({p.delta / kTwoPi * 1e3, p.p_target, p.p_blocked});
    }
    ordered_json extra;
    extra["b_gauss"] = rc.b_gauss;
    extra["delta3_khz"] = raman::delta_three_level(rc) / kTwoPi * 1e3;
    extra["delta4_khz"] = raman::delta_four_level(rc) / kTwoPi * 1e3;
    for (const auto& w : rc.warnings()) {
        std::cerr << "warning: " << w << '\n';
    }
    emit_table(common, cfg, {"delta_khz", "p_three_level", "p_four_level"}, rows, extra);
    return 0;
}

// ---- simulation report -------------------------------------------------

struct Entry {
    std::string section;
    std::string name;
    double value = 0.0;
    double sigma = kNaN;
};

std::vector<seqsim::ScheduledSetting> schedule_for(const config::ScenarioConfig& cfg) {
    if (cfg.simulate.mode == config::SimulationMode::ThreeBasis) {
        return seqsim::three_basis_schedule();
    }
    std::vector<seqsim::ScheduledSetting> out;
    const auto plan = seqsim::ScanPlan::standard();
    const char* tags[2] = {"HV", "DA"};
    for (std::size_t b = 0; b < plan.photon_bases.size(); ++b) {
        for (double a : plan.atom_angles) {
            out.push_back({std::string(tags[b % 2]) + "@" + report::format_number(a * 180.0 / std::numbers::pi),
                           {plan.photon_bases[b], qstate::AtomBasis::linear(a)},
                           1.0});
        }
    }
    return out;
}

std::vector<Entry> build_report(const config::ScenarioConfig& cfg, const seqsim::RunSummary& s) {
    std::vector<Entry> e;
    const double records = static_cast<double>(s.records);
    e.push_back({"run", "records", records});
    e.push_back({"run", "attempts", static_cast<double>(s.attempts)});
    e.push_back({"run", "wall_hours", s.wall_us / 3.6e9});
    e.push_back({"run", "active_hours", s.active_us / 3.6e9});
    e.push_back({"run", "duty_cycle", s.duty_cycle});
    e.push_back({"run", "seed", static_cast<double>(s.seed)});
    if (s.records > 0) {
        const double noise = static_cast<double>(s.by_truth[1] + s.by_truth[2]) / records;
        e.push_back({"run", "noise_fraction", noise, std::sqrt(noise * (1.0 - noise) / records)});
    }

    for (std::size_t i = 0; i < s.counts.size(); ++i) {
        const auto& c = s.counts[i];
        const std::string label = i < s.setting_labels.size() && !s.setting_labels[i].empty()
                                      ? s.setting_labels[i]
                                      : "setting" + std::to_string(i);
        const char* cols[3] = {"plus", "minus", "leak"};
        for (int p = 0; p < 2; ++p) {
            for (int a = 0; a < 3; ++a) {
                e.push_back({"counts", label + (p == 0 ? ".photon_plus." : ".photon_minus.") + cols[a],
                             static_cast<double>(c.n[p][a])});
            }
        }
    }

    auto model = cfg.sequence;
    model.schedule = seqsim::three_basis_schedule();
    const auto predicted = seqsim::predict_three_basis(model);
    e.push_back({"model", "E_X", predicted.e_x});
    e.push_back({"model", "E_Y", predicted.e_y});
    e.push_back({"model", "E_Z", predicted.e_z});
    e.push_back({"model", "fidelity_bound", predicted.fidelity_bound()});
    const auto att = seqsim::attribute_errors(model);
    const auto terms = att.budget.terms();
    const auto names = analysis::ErrorBudget::names();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        e.push_back({"budget", names[i], terms[i]});
    }
    e.push_back({"budget", "fidelity_multiplicative",
                 analysis::compose_error_budget(att.budget, analysis::Composition::Multiplicative)});
    e.push_back({"budget", "fidelity_additive", analysis::compose_error_budget(att.budget, analysis::Composition::Additive)});

    if (cfg.simulate.mode == config::SimulationMode::ThreeBasis) {
        if (s.counts.size() >= 3 && s.counts[0].total() && s.counts[1].total() && s.counts[2].total()) {
            double var = 0.0;
            double mean = 0.0;
            const char* basis[3] = {"E_X", "E_Y", "E_Z"};
            for (int i = 0; i < 3; ++i) {
                const auto est = analysis::correlator_from_counts(s.counts[static_cast<std::size_t>(i)].same_different());
                e.push_back({"correlator", basis[i], est.value, est.sigma});
                mean += est.value / 3.0;
                var += est.sigma * est.sigma / 9.0;
            }
            e.push_back({"fidelity", "mean_visibility", mean, std::sqrt(var)});
            e.push_back({"fidelity", "lower_bound", analysis::fidelity_lower_bound(std::clamp(mean, -1.0, 1.0)),
                         5.0 / 6.0 * std::sqrt(var)});
        }
        return e;
    }

    // Scan mode: rebuild the cell layout from the standard plan.
    const auto plan = seqsim::ScanPlan::standard();
    seqsim::CorrelationScan scan;
    scan.photon_bases = plan.photon_bases;
    scan.atom_angles = plan.atom_angles;
    std::size_t k = 0;
    bool complete = true;
    for (std::size_t b = 0; b < plan.photon_bases.size(); ++b) {
        for (double a : plan.atom_angles) {
            const auto& c = k < s.counts.size() ? s.counts[k] : seqsim::OutcomeCounts{};
            complete = complete && c.total() > 0;
            scan.cells.push_back({static_cast<int>(b), a, c});
            ++k;
        }
    }
    if (!complete) {
        return e;
    }
    const auto fringes = seqsim::fit_fringes(scan);
    const char* port_names[2][2] = {{"H", "V"}, {"D", "A"}};
    for (std::size_t i = 0; i < fringes.fits.size(); ++i) {
        const auto& f = fringes.fits[i];
        const std::string tag = port_names[i / 2][i % 2];
        e.push_back({"fringe", tag + ".visibility", f.visibility, f.sigma_visibility});
        e.push_back({"fringe", tag + ".phase_deg", f.phase * 180.0 / std::numbers::pi, f.sigma_phase * 180.0 / std::numbers::pi});
    }
    e.push_back({"fidelity", "mean_visibility", fringes.mean_visibility, fringes.mean_visibility_sigma});
    e.push_back({"fidelity", "lower_bound",
                 analysis::fidelity_lower_bound(std::clamp(fringes.mean_visibility, -1.0, 1.0)),
                 5.0 / 6.0 * fringes.mean_visibility_sigma});
    const auto chsh = seqsim::chsh_from_scan(scan);
    e.push_back({"chsh", "S", chsh.s, chsh.sigma});
    return e;
}

void write_report(std::ostream& os, const std::string& format, const config::ScenarioConfig& cfg,
                  const seqsim::RunSummary& s, const std::vector<Entry>& entries) {
    const auto echo = config::to_json_text(cfg);
    if (format == "csv") {
        report::CsvWriter w(os, {"section", "name", "value", "sigma"},
                            echo + "\ngenerator: " + s.generator + "\nseed: " + std::to_string(s.seed));
        for (const auto& en : entries) {
            w.row({en.section, en.name, en.value, en.sigma});
        }
        return;
    }
    ordered_json doc;
    doc["config"] = ordered_json::parse(echo);
    doc["generator"] = s.generator;
    doc["seed"] = s.seed;
    ordered_json rep = ordered_json::object();
    for (const auto& en : entries) {
        auto& sec = rep[en.section];
        if (std::isnan(en.sigma)) {
            sec[en.name] = number(en.value);
        } else {
            sec[en.name] = {{"value", number(en.value)}, {"sigma", number(en.sigma)}};
        }
    }
    doc["report"] = rep;
    os << doc.dump(2) << '\n';
}

void write_records(std::ostream& os, const config::ScenarioConfig& cfg, const seqsim::Campaign& c) {
    report::CsvWriter w(os, {"time_us", "attempt_idx", "photon_port", "atom_outcome", "truth_tag", "setting"},
                        config::to_json_text(cfg) + "\ngenerator: " + c.summary.generator +
                            "\nseed: " + std::to_string(c.summary.seed));
    for (const auto& r : c.records) {
        w.row({r.time_us, static_cast<std::uint64_t>(r.attempt_index), static_cast<std::int64_t>(r.photon_port),
               static_cast<std::int64_t>(r.atom_outcome), std::string(seqsim::to_string(r.truth)),
               static_cast<std::int64_t>(r.setting)});
    }
}

int cmd_simulate(const Common& common, std::optional<std::uint64_t> events, std::optional<double> hours,
                 const std::string& report_path) {
    auto cfg = load(common);
    seqsim::StopCondition stop;
    stop.max_events = events ? events : cfg.simulate.max_events;
    stop.max_hours = hours ? hours : cfg.simulate.max_hours;
    if (!stop.max_events && !stop.max_hours) {
        throw ConfigError("simulate: give --events or --hours (or simulate.max_events in the config)");
    }
    auto seq = cfg.sequence;
    seq.schedule = schedule_for(cfg);
    const auto campaign = seqsim::run_campaign(seq, stop);
    if (!common.out.empty()) {
        Sink sink(common.out);
        write_records(sink.stream(), cfg, campaign);
    }
    const auto entries = build_report(cfg, campaign.summary);
    Sink rep(report_path);
    write_report(rep.stream(), common.format, cfg, campaign.summary, entries);
    return 0;
}

int cmd_analyze(const Common& common, const std::string& records_path) {
    auto cfg = load(common);
    std::ifstream in(records_path);
    if (!in) {
        throw std::runtime_error("cannot read " + records_path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    const auto rows = report::read_csv(text.str());
    if (rows.empty() || rows[0].size() < 6 || rows[0][0] != "time_us") {
        throw std::runtime_error(records_path + ": not a record log");
    }
    const auto schedule = schedule_for(cfg);
    seqsim::RunSummary s;
    s.counts.resize(schedule.size());
    for (const auto& st : schedule) {
        s.setting_labels.push_back(st.label);
    }
    s.duty_cycle = cfg.duty_cycle;
    s.seed = cfg.simulate.seed;
    s.generator = std::string(Rng::generator_name());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() < 6) {
            throw std::runtime_error(records_path + ": short row " + std::to_string(i));
        }
        const auto setting = static_cast<std::size_t>(report::parse_number(r[5]));
        if (setting >= s.counts.size()) {
            throw std::runtime_error(records_path + ": setting index outside the configured schedule");
        }
        s.counts[setting].add(static_cast<int>(report::parse_number(r[2])), static_cast<int>(report::parse_number(r[3])));
        ++s.records;
        const auto tag = r[4];
        ++s.by_truth[tag == "signal" ? 0 : (tag == "qfc" ? 1 : 2)];
        s.wall_us = std::max(s.wall_us, report::parse_number(r[0]));
        s.attempts = std::max<std::uint64_t>(s.attempts, static_cast<std::uint64_t>(report::parse_number(r[1])) + 1);
    }
    const auto entries = build_report(cfg, s);
    Sink sink(common.out);
    write_report(sink.stream(), common.format, cfg, s, entries);
    return 0;
}

int cmd_coherence(const Common& common, const std::string& basis_opt, const std::vector<double>& delays) {
    auto cfg = load(common);
    std::string basis = basis_opt;
    if (basis.empty()) {
        basis = cfg.coherence_scan.basis == config::CoherenceBasis::Memory
                    ? "memory"
                    : (cfg.coherence_scan.basis == config::CoherenceBasis::Initial ? "initial" : "both");
    }
    std::vector<std::pair<std::string, decoherence::CoherenceModel>> models;
    if (basis == "memory" || basis == "both") {
        models.emplace_back("memory", cfg.memory);
    }
    if (basis == "initial" || basis == "both") {
        models.emplace_back("initial", cfg.initial);
    }
    std::vector<std::vector<Cell>> rows;
    ordered_json extra;
    std::uint64_t stream = 0;
    for (const auto& [name, model] : models) {
        decoherence::ScanConfig sc;
        sc.model = model;
        sc.delays_us = !delays.empty() ? delays
                       : !cfg.coherence_scan.delays_us.empty()
                           ? cfg.coherence_scan.delays_us
                           : decoherence::linear_delays(cfg.coherence_scan.t_max_over_t2 * model.t2_us,
                                                        cfg.coherence_scan.n_delays);
        sc.angles = cfg.coherence_scan.angles;
        sc.counts_per_angle = cfg.coherence_scan.counts_per_angle;
        sc.seed = cfg.simulate.seed + stream++;
        const auto res = decoherence::run_scan(sc);
        for (const auto& p : res.points) {
            rows.push_back({name, p.delay_us, p.fringe.visibility, p.fringe.sigma_visibility,
                            p.fringe.phase * 180.0 / std::numbers::pi});
        }
        extra[name + "_t2_us"] = number(res.decay.t2);
        extra[name + "_t2_sigma_us"] = number(res.decay.sigma_t2);
        extra[name + "_v0"] = number(res.decay.v0);
        extra[name + "_larmor_khz"] = model.larmor_khz;
        for (const auto& w : res.decay.warnings) {
            std::cerr << "warning: " << name << ": " << w << '\n';
        }
    }
    emit_table(common, cfg, {"basis", "delay_us", "visibility", "sigma_visibility", "phase_deg"}, rows, extra);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"atomlink: long-distance atom-photon entanglement link model"};
    app.require_subcommand(1);

    Common common;
    RangeOpts range;

    auto* rate_cmd = app.add_subcommand("rate", "Attempt period, repetition rate and entanglement rate vs. length");
    add_common(rate_cmd, common);
    add_range(rate_cmd, range);

    auto* snr_cmd = app.add_subcommand("snr", "Click probabilities and SNR vs. length");
    add_common(snr_cmd, common);
    add_range(snr_cmd, range);
    std::optional<double> dark_counts;
    snr_cmd->add_option("--dark-counts", dark_counts, "Override the per-detector dark count rate (cps)");

    auto* raman_cmd = app.add_subcommand("raman", "Raman transfer spectrum vs. two-photon detuning");
    add_common(raman_cmd, common);
    std::optional<double> b_gauss;
    std::optional<double> dmin;
    std::optional<double> dmax;
    std::optional<int> points;
    raman_cmd->add_option("--b-gauss", b_gauss, "Bias field (G)");
    raman_cmd->add_option("--delta-min-khz", dmin, "Scan start");
    raman_cmd->add_option("--delta-max-khz", dmax, "Scan end");
    raman_cmd->add_option("--points", points, "Number of grid points");

    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo run of the experimental sequence");
    add_common(sim_cmd, common);
    std::optional<std::uint64_t> events;
    std::optional<double> hours;
    std::string report_path;
    sim_cmd->add_option("--events", events, "Stop after this many heralds");
    sim_cmd->add_option("--hours", hours, "Stop after this much simulated wall-clock time");
    sim_cmd->add_option("--report", report_path, "Analysis report file (default: stdout)");

    auto* coh_cmd = app.add_subcommand("coherence", "Synthetic storage-time scan with T2 fit");
    add_common(coh_cmd, common);
    std::string basis;
    std::vector<double> delays;
    coh_cmd->add_option("--basis", basis, "memory, initial or both")->check(CLI::IsMember({"memory", "initial", "both"}));
    coh_cmd->add_option("--delays", delays, "Storage times (us)")->delimiter(',');

    auto* an_cmd = app.add_subcommand("analyze", "Recompute the analysis report from a record log");
    add_common(an_cmd, common);
    std::string records_path;
    an_cmd->add_option("--records", records_path, "Record log written by simulate --out")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*rate_cmd) {
            return cmd_rate(common, range);
        }
        if (*snr_cmd) {
            return cmd_snr(common, range, dark_counts);
        }
        if (*raman_cmd) {
            return cmd_raman(common, b_gauss, dmin, dmax, points);
        }
        if (*sim_cmd) {
            return cmd_simulate(common, events, hours, report_path);
        }
        if (*coh_cmd) {
            return cmd_coherence(common, basis, delays);
        }
        if (*an_cmd) {
            return cmd_analyze(common, records_path);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
