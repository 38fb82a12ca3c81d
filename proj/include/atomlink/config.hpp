#pragma once

// Scenario documents (YAML). Every physical key carries its unit in the name;
// cyclic MHz/kHz values are converted to the angular units used by the raman
// module on load. Unknown keys are rejected with the full key path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "atomlink/decoherence.hpp"
#include "atomlink/link.hpp"
#include "atomlink/raman.hpp"
#include "atomlink/rate.hpp"
#include "atomlink/seqsim.hpp"
#include "atomlink/zeeman.hpp"

namespace atomlink::config {

struct LengthSweep {
    double start_km = 0.0;
    double stop_km = 101.0;
    double step_km = 1.0;

    /// Throws ConfigError on a descending range or non-positive step.
    std::vector<double> lengths() const;
};

struct RamanScan {
    double delta_min_khz = -800.0;
    double delta_max_khz = 800.0;
    int n_points = 401;
};

enum class CoherenceBasis { Memory, Initial, Both };

struct CoherenceScanSettings {
    CoherenceBasis basis = CoherenceBasis::Both;
    double t_max_over_t2 = 3.0;
    int n_delays = 16;
    std::vector<double> delays_us;  ///< overrides the even grid when non-empty
    int angles = 8;
    std::uint64_t counts_per_angle = 1000;
};

enum class SimulationMode { ThreeBasis, Scan };

struct SimulateSettings {
    SimulationMode mode = SimulationMode::ThreeBasis;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> max_events;
    std::optional<double> max_hours;
};

struct ScenarioConfig {
    std::string name;
    zeeman::AtomicConstants constants;
    link::LinkParams link;
    rate::TimingBudget timing;
    double duty_cycle = 0.5;
    LengthSweep sweep;
    raman::RamanConfig raman;
    RamanScan raman_scan;
    decoherence::CoherenceModel memory;
    decoherence::CoherenceModel initial;
    CoherenceScanSettings coherence_scan;
    seqsim::SequenceConfig sequence;
    SimulateSettings simulate;

    /// Runs every module's validation; failures are rethrown as ConfigError.
    void validate() const;
};

/// Document defaults (the values used when a key is absent).
ScenarioConfig default_scenario();

ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario(const std::string& yaml_text, const std::string& origin = "<string>");

/// Directory searched for named presets: $ATOMLINK_CONFIG_DIR if set, then the
/// source-tree presets directory.
std::vector<std::filesystem::path> preset_search_path();
std::filesystem::path find_preset(const std::string& name);

/// Canonical JSON echo of the resolved scenario (units in key names).
std::string to_json_text(const ScenarioConfig& config, int indent = 2);

} // namespace atomlink::config
