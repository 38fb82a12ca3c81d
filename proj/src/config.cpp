#include "atomlink/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "atomlink/error.hpp"

#ifndef ATOMLINK_DEFAULT_PRESET_DIR
#define ATOMLINK_DEFAULT_PRESET_DIR "presets"
#endif

namespace atomlink::config {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// One mapping node plus the keys read from it, so leftovers can be reported.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) {
            throw ConfigError(where() + ": expected a mapping");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
    }

    template <class T>
    void get(const std::string& key, T& out) {
        if (!has(key)) {
            return;
        }
        out = convert<T>(node_[key], key);
    }

    template <class T>
    void get(const std::string& key, std::optional<T>& out) {
        if (!has(key)) {
            return;
        }
        out = convert<T>(node_[key], key);
    }

    std::vector<double> get_list(const std::string& key) {
        std::vector<double> out;
        if (!has(key)) {
            return out;
        }
        const auto node = node_[key];
        if (!node.IsSequence()) {
            throw ConfigError(qualified(key) + ": expected a list of numbers");
        }
        for (std::size_t i = 0; i < node.size(); ++i) {
            out.push_back(convert<double>(node[i], key + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

    Section child(const std::string& key) {
        seen_.insert(key);
        if (node_ && node_.IsMap() && node_[key]) {
            return Section(node_[key], qualified(key));
        }
        return Section(YAML::Node(), qualified(key));
    }

    void finish() const {
        if (!node_ || !node_.IsMap()) {
            return;
        }
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key)) {
                throw ConfigError(qualified(key) + ": unknown key");
            }
        }
    }

    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    template <class T>
    T convert(const YAML::Node& node, const std::string& key) const {
        if (!node.IsScalar()) {
            throw ConfigError(qualified(key) + ": expected a scalar value");
        }
        try {
            if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, unsigned>) {
                const auto v = node.as<long long>();
                if (v < 0) {
                    throw ConfigError(qualified(key) + ": must be non-negative");
                }
                return static_cast<T>(v);
            } else if constexpr (std::is_same_v<T, double>) {
                const auto v = node.as<double>();
                if (!std::isfinite(v)) {
                    throw ConfigError(qualified(key) + ": must be finite");
                }
                return v;
            } else {
                return node.as<T>();
            }
        } catch (const YAML::Exception&) {
            throw ConfigError(qualified(key) + ": cannot read '" + node.Scalar() + "'");
        }
    }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

decoherence::DecayShape parse_shape(const std::string& s, const std::string& path) {
    if (s == "exponential") {
        return decoherence::DecayShape::Exponential;
    }
    if (s == "gaussian") {
        return decoherence::DecayShape::Gaussian;
    }
    throw ConfigError(path + ": expected 'exponential' or 'gaussian', got '" + s + "'");
}

const char* shape_name(decoherence::DecayShape s) {
    return s == decoherence::DecayShape::Exponential ? "exponential" : "gaussian";
}

const char* basis_name(CoherenceBasis b) {
    switch (b) {
    case CoherenceBasis::Memory:
        return "memory";
    case CoherenceBasis::Initial:
        return "initial";
    case CoherenceBasis::Both:
        return "both";
    }
    return "both";
}

void read_coherence_model(Section s, decoherence::CoherenceModel& m) {
    s.get("t2_us", m.t2_us);
    s.get("v0", m.v0);
    std::string shape = shape_name(m.shape);
    s.get("shape", shape);
    m.shape = parse_shape(shape, s.qualified("shape"));
    s.finish();
}

template <class F>
void section_check(const char* name, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string(name) + ": " + e.what());
    }
}

ScenarioConfig from_yaml(const YAML::Node& root) {
    ScenarioConfig cfg = default_scenario();
    Section top(root, "");
    top.get("name", cfg.name);

    {
        auto s = top.child("constants");
        auto& c = cfg.constants;
        s.get("g_j", c.g_j);
        s.get("g_i", c.g_i);
        s.get("mu_b_mhz_per_gauss", c.mu_b_mhz_per_gauss);
        s.get("hfs_mhz", c.hfs_mhz);
        s.get("excited_hfs_mhz", c.excited_hfs_mhz);
        s.get("g_f_excited", c.g_f_excited);
        s.finish();
    }
    {
        auto s = top.child("link");
        auto& l = cfg.link;
        s.get("length_km", l.length_km);
        s.get("attenuation_db_per_km", l.attenuation_db_per_km);
        s.get("fiber_speed_km_per_s", l.fiber_speed_km_per_s);
        s.get("eta_collect", l.eta_collect);
        s.get("eta_switch", l.eta_switch);
        s.get("eta_qfc", l.eta_qfc);
        s.get("eta_filter", l.eta_filter);
        s.get("eta_projection", l.eta_projection);
        s.get("eta_connectors", l.eta_connectors);
        s.get("eta_detector", l.eta_detector);
        s.get("n_detectors", l.n_detectors);
        s.get("dark_count_cps", l.dark_count_cps);
        s.get("qfc_background_cps", l.qfc_background_cps);
        s.get("window_ns", l.window_ns);
        s.get("window_fraction", l.window_fraction);
        s.finish();
    }
    {
        auto s = top.child("timing");
        auto& t = cfg.timing;
        s.get("prep_us", t.prep_us);
        s.get("entangle_us", t.entangle_us);
        s.get("raman_us", t.raman_us);
        s.get("cooling_us", t.cooling_us);
        s.get("attempts_per_cooling", t.attempts_per_cooling);
        s.finish();
    }
    {
        auto s = top.child("rate");
        s.get("duty_cycle", cfg.duty_cycle);
        auto sw = s.child("sweep");
        sw.get("start_km", cfg.sweep.start_km);
        sw.get("stop_km", cfg.sweep.stop_km);
        sw.get("step_km", cfg.sweep.step_km);
        sw.finish();
        s.finish();
    }
    {
        auto s = top.child("raman");
        double b = cfg.raman.b_gauss;
        double mean_mhz = cfg.raman.mean_detuning / kTwoPi;
        double pi_time = 8.0;
        s.get("b_gauss", b);
        s.get("mean_detuning_mhz", mean_mhz);
        s.get("pi_time_us", pi_time);
        section_check("raman", [&] { cfg.raman = raman::dipole_config(b, kTwoPi * mean_mhz, pi_time, cfg.constants); });
        s.get("pulse_duration_us", cfg.raman.pulse_duration_us);
        auto r = s.child("rabi_mhz");
        const std::pair<const char*, double*> rabi[] = {{"mk", &cfg.raman.rabi_mk}, {"nk", &cfg.raman.rabi_nk},
                                                       {"a3", &cfg.raman.rabi_a3}, {"b3", &cfg.raman.rabi_b3},
                                                       {"a4", &cfg.raman.rabi_a4}, {"b4", &cfg.raman.rabi_b4}};
        for (const auto& [key, field] : rabi) {
            std::optional<double> v;
            r.get(key, v);
            if (v) {
                *field = kTwoPi * *v;
            }
        }
        r.finish();
        std::optional<double> delta_khz;
        s.get("two_photon_detuning_khz", delta_khz);
        section_check("raman", [&] {
            cfg.raman.two_photon_detuning =
                delta_khz ? kTwoPi * *delta_khz * 1e-3 : raman::delta_three_level(cfg.raman);
        });
        auto sc = s.child("scan");
        sc.get("delta_min_khz", cfg.raman_scan.delta_min_khz);
        sc.get("delta_max_khz", cfg.raman_scan.delta_max_khz);
        sc.get("n_points", cfg.raman_scan.n_points);
        sc.finish();
        s.finish();
    }
    double b_coherence = cfg.sequence.b_gauss;
    {
        auto s = top.child("coherence");
        s.get("b_gauss", b_coherence);
        read_coherence_model(s.child("memory"), cfg.memory);
        read_coherence_model(s.child("initial"), cfg.initial);
        auto sc = s.child("scan");
        std::string basis = basis_name(cfg.coherence_scan.basis);
        sc.get("basis", basis);
        if (basis == "memory") {
            cfg.coherence_scan.basis = CoherenceBasis::Memory;
        } else if (basis == "initial") {
            cfg.coherence_scan.basis = CoherenceBasis::Initial;
        } else if (basis == "both") {
            cfg.coherence_scan.basis = CoherenceBasis::Both;
        } else {
            throw ConfigError(sc.qualified("basis") + ": expected memory, initial or both");
        }
        sc.get("t_max_over_t2", cfg.coherence_scan.t_max_over_t2);
        sc.get("n_delays", cfg.coherence_scan.n_delays);
        cfg.coherence_scan.delays_us = sc.get_list("delays_us");
        sc.get("angles", cfg.coherence_scan.angles);
        sc.get("counts_per_angle", cfg.coherence_scan.counts_per_angle);
        sc.finish();
        s.finish();
    }
    {
        auto s = top.child("sequence");
        auto& q = cfg.sequence;
        s.get("burst_length", q.burst_length);
        s.get("pgc_us", q.pgc_us);
        s.get("ramp_down_us", q.ramp_down_us);
        s.get("field_stabilization_us", q.field_stabilization_us);
        s.get("ramp_back_us", q.ramp_back_us);
        s.get("readout_us", q.readout_us);
        s.get("pump_efficiency", q.pump_efficiency);
        s.get("excitation_efficiency", q.excitation_efficiency);
        s.get("excited_lifetime_ns", q.excited_lifetime_ns);
        s.get("initial_storage_us", q.initial_storage_us);
        s.get("threads", q.threads);
        auto c = s.child("channels");
        auto& ch = q.channels;
        c.get("entanglement_error", ch.entanglement_error);
        c.get("raman_efficiency", ch.raman_efficiency);
        c.get("raman_blocked_leak", ch.raman_blocked_leak);
        c.get("decoherence", ch.decoherence);
        c.get("readout_timing_jitter_ns", ch.readout_timing_jitter_ns);
        c.get("readout_error", ch.readout_error);
        c.get("drift_dephasing", ch.drift_dephasing);
        c.get("drift_white", ch.drift_white);
        c.get("noise_clicks", ch.noise_clicks);
        c.get("compensate_larmor", ch.compensate_larmor);
        c.finish();
        s.finish();
    }
    {
        auto s = top.child("simulate");
        std::string mode = cfg.simulate.mode == SimulationMode::Scan ? "scan" : "three_basis";
        s.get("mode", mode);
        if (mode == "scan") {
            cfg.simulate.mode = SimulationMode::Scan;
        } else if (mode == "three_basis") {
            cfg.simulate.mode = SimulationMode::ThreeBasis;
        } else {
            throw ConfigError(s.qualified("mode") + ": expected three_basis or scan");
        }
        s.get("seed", cfg.simulate.seed);
        s.get("max_events", cfg.simulate.max_events);
        s.get("max_hours", cfg.simulate.max_hours);
        s.finish();
    }
    top.finish();

    // Shared quantities are owned by one section and copied into the others.
    auto& q = cfg.sequence;
    q.link = cfg.link;
    q.timing = cfg.timing;
    q.duty_cycle = cfg.duty_cycle;
    q.b_gauss = b_coherence;
    q.constants = cfg.constants;
    cfg.memory.larmor_khz = zeeman::larmor_frequency_khz(cfg.memory.basis, b_coherence, cfg.constants);
    cfg.initial.larmor_khz = zeeman::larmor_frequency_khz(cfg.initial.basis, b_coherence, cfg.constants);
    q.memory = cfg.memory;
    q.initial = cfg.initial;
    q.rng_seed = cfg.simulate.seed;
    q.schedule = seqsim::three_basis_schedule();
    return cfg;
}

} // namespace

std::vector<double> LengthSweep::lengths() const {
    if (!(step_km > 0.0)) {
        throw ConfigError("rate.sweep.step_km: must be positive");
    }
    if (start_km < 0.0) {
        throw ConfigError("rate.sweep.start_km: must be >= 0");
    }
    if (stop_km < start_km) {
        throw ConfigError("rate.sweep: descending length range");
    }
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((stop_km - start_km) / step_km + 1e-9));
    for (long i = 0; i <= n; ++i) {
        out.push_back(start_km + static_cast<double>(i) * step_km);
    }
    return out;
}

void ScenarioConfig::validate() const {
    section_check("link", [&] { link.validate(); });
    section_check("timing", [&] { timing.validate(); });
    section_check("rate", [&] {
        if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) {
            throw ParameterError("duty_cycle must lie in (0,1]");
        }
        (void)sweep.lengths();
    });
    section_check("raman", [&] {
        raman.validate();
        if (raman_scan.n_points < 2) {
            throw ParameterError("scan.n_points must be >= 2");
        }
        if (!(raman_scan.delta_max_khz > raman_scan.delta_min_khz)) {
            throw ParameterError("scan range must be increasing");
        }
    });
    section_check("coherence", [&] {
        memory.validate();
        initial.validate();
        if (coherence_scan.angles < 4) {
            throw ParameterError("scan.angles must be >= 4");
        }
        if (coherence_scan.counts_per_angle == 0) {
            throw ParameterError("scan.counts_per_angle must be positive");
        }
        if (coherence_scan.delays_us.empty() && coherence_scan.n_delays < 1) {
            throw ParameterError("scan.n_delays must be >= 1");
        }
        for (double d : coherence_scan.delays_us) {
            detail::require_non_negative(d, "scan.delays_us entry");
        }
    });
    section_check("sequence", [&] { sequence.validate(); });
    section_check("simulate", [&] {
        if (simulate.max_hours) {
            detail::require_non_negative(*simulate.max_hours, "max_hours");
        }
    });
}

ScenarioConfig default_scenario() {
    ScenarioConfig cfg;
    cfg.name = "custom";
    cfg.raman = raman::default_config(0.2445);
    cfg.memory = decoherence::CoherenceModel{zeeman::QubitBasis::Memory, 6910.0, 0.80, 0.0};
    cfg.initial = decoherence::CoherenceModel{zeeman::QubitBasis::Initial, 322.5, 0.85, 0.0};
    cfg.sequence.schedule = seqsim::three_basis_schedule();
    return cfg;
}

ScenarioConfig parse_scenario(const std::string& yaml_text, const std::string& origin) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    ScenarioConfig cfg;
    try {
        cfg = from_yaml(root);
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path.string());
}

std::vector<std::filesystem::path> preset_search_path() {
    std::vector<std::filesystem::path> out;
    if (const char* env = std::getenv("ATOMLINK_CONFIG_DIR"); env != nullptr && *env != '\0') {
        out.emplace_back(env);
    }
    out.emplace_back(ATOMLINK_DEFAULT_PRESET_DIR);
    return out;
}

std::filesystem::path find_preset(const std::string& name) {
    for (const auto& dir : preset_search_path()) {
        for (const auto& candidate : {dir / (name + ".yaml"), dir / (name + ".yml"), dir / name}) {
            if (std::filesystem::is_regular_file(candidate)) {
                return candidate;
            }
        }
    }
    throw ConfigError("preset '" + name + "' not found (set ATOMLINK_CONFIG_DIR)");
}

std::string to_json_text(const ScenarioConfig& c, int indent) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["name"] = c.name;
    j["constants"] = {{"g_j", c.constants.g_j},
                      {"g_i", c.constants.g_i},
                      {"mu_b_mhz_per_gauss", c.constants.mu_b_mhz_per_gauss},
                      {"hfs_mhz", c.constants.hfs_mhz},
                      {"excited_hfs_mhz", c.constants.excited_hfs_mhz},
                      {"g_f_excited", c.constants.g_f_excited}};
    const auto& l = c.link;
    j["link"] = {{"length_km", l.length_km},
                 {"attenuation_db_per_km", l.attenuation_db_per_km},
                 {"fiber_speed_km_per_s", l.fiber_speed_km_per_s},
                 {"eta_collect", l.eta_collect},
                 {"eta_switch", l.eta_switch},
                 {"eta_qfc", l.eta_qfc},
                 {"eta_filter", l.eta_filter},
                 {"eta_projection", l.eta_projection},
                 {"eta_connectors", l.eta_connectors},
                 {"eta_detector", l.eta_detector},
                 {"n_detectors", l.n_detectors},
                 {"dark_count_cps", l.dark_count_cps},
                 {"qfc_background_cps", l.qfc_background_cps},
                 {"window_ns", l.window_ns},
                 {"window_fraction", l.window_fraction}};
    const auto& t = c.timing;
    j["timing"] = {{"prep_us", t.prep_us},
                   {"entangle_us", t.entangle_us},
                   {"raman_us", t.raman_us},
                   {"cooling_us", t.cooling_us},
                   {"attempts_per_cooling", t.attempts_per_cooling}};
    j["rate"] = {{"duty_cycle", c.duty_cycle},
                 {"sweep", {{"start_km", c.sweep.start_km}, {"stop_km", c.sweep.stop_km}, {"step_km", c.sweep.step_km}}}};
    const auto& r = c.raman;
    j["raman"] = {{"b_gauss", r.b_gauss},
                  {"mean_detuning_mhz", r.mean_detuning / kTwoPi},
                  {"pulse_duration_us", r.pulse_duration_us},
                  {"rabi_mhz",
                   {{"mk", r.rabi_mk / kTwoPi},
                    {"nk", r.rabi_nk / kTwoPi},
                    {"a3", r.rabi_a3 / kTwoPi},
                    {"b3", r.rabi_b3 / kTwoPi},
                    {"a4", r.rabi_a4 / kTwoPi},
                    {"b4", r.rabi_b4 / kTwoPi}}},
                  {"two_photon_detuning_khz", r.two_photon_detuning / kTwoPi * 1e3},
                  {"scan",
                   {{"delta_min_khz", c.raman_scan.delta_min_khz},
                    {"delta_max_khz", c.raman_scan.delta_max_khz},
                    {"n_points", c.raman_scan.n_points}}}};
    auto model = [](const decoherence::CoherenceModel& m) {
        return ordered_json{{"t2_us", m.t2_us}, {"v0", m.v0}, {"shape", shape_name(m.shape)}};
    };
    const auto& cs = c.coherence_scan;
    j["coherence"] = {{"b_gauss", c.sequence.b_gauss},
                      {"memory", model(c.memory)},
                      {"initial", model(c.initial)},
                      {"scan",
                       {{"basis", basis_name(cs.basis)},
                        {"t_max_over_t2", cs.t_max_over_t2},
                        {"n_delays", cs.n_delays},
                        {"delays_us", cs.delays_us},
                        {"angles", cs.angles},
                        {"counts_per_angle", cs.counts_per_angle}}}};
    const auto& q = c.sequence;
    const auto& ch = q.channels;
    j["sequence"] = {{"burst_length", q.burst_length},
                     {"pgc_us", q.pgc_us},
                     {"ramp_down_us", q.ramp_down_us},
                     {"field_stabilization_us", q.field_stabilization_us},
                     {"ramp_back_us", q.ramp_back_us},
                     {"readout_us", q.readout_us},
                     {"pump_efficiency", q.pump_efficiency},
                     {"excitation_efficiency", q.excitation_efficiency},
                     {"excited_lifetime_ns", q.excited_lifetime_ns},
                     {"initial_storage_us", q.initial_storage_us},
                     {"threads", q.threads},
                     {"channels",
                      {{"entanglement_error", ch.entanglement_error},
                       {"raman_efficiency", ch.raman_efficiency},
                       {"raman_blocked_leak", ch.raman_blocked_leak},
                       {"decoherence", ch.decoherence},
                       {"readout_timing_jitter_ns", ch.readout_timing_jitter_ns},
                       {"readout_error", ch.readout_error},
                       {"drift_dephasing", ch.drift_dephasing},
                       {"drift_white", ch.drift_white},
                       {"noise_clicks", ch.noise_clicks},
                       {"compensate_larmor", ch.compensate_larmor}}}};
    ordered_json sim = {{"mode", c.simulate.mode == SimulationMode::Scan ? "scan" : "three_basis"},
                        {"seed", c.simulate.seed}};
    sim["max_events"] = c.simulate.max_events ? ordered_json(*c.simulate.max_events) : ordered_json(nullptr);
    sim["max_hours"] = c.simulate.max_hours ? ordered_json(*c.simulate.max_hours) : ordered_json(nullptr);
    j["simulate"] = sim;
    return j.dump(indent);
}

} // namespace atomlink::config
