#include <doctest.h>

#include <string>

#include "atomlink/config.hpp"
#include "atomlink/error.hpp"

using namespace atomlink;
using namespace atomlink::config;

namespace {

std::string message_of(const std::string& yaml) {
    try {
        parse_scenario(yaml);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("presets load and validate") {
    for (const char* name : {"paper-5km", "paper-50km", "paper-101km"}) {
        CAPTURE(name);
        const auto cfg = load_scenario(find_preset(name));
        CHECK(cfg.name == name);
        CHECK(cfg.sequence.link.length_km == cfg.link.length_km);
        CHECK(cfg.sequence.schedule.size() == 3);
    }
    CHECK_THROWS_AS(find_preset("no-such-preset"), ConfigError);
}

TEST_CASE("empty document gives the defaults") {
    const auto cfg = parse_scenario("{}");
    const auto def = default_scenario();
    CHECK(to_json_text(cfg) == to_json_text(def));
}

TEST_CASE("cyclic units are converted on load") {
    const auto cfg = parse_scenario("raman: {mean_detuning_mhz: 2700}\n");
    CHECK(cfg.raman.mean_detuning == doctest::Approx(2.0 * 3.14159265358979 * 2700.0));
}

TEST_CASE("unknown keys are reported with their path") {
    CHECK(message_of("link: {lenght_km: 5}\n").find("link.lenght_km: unknown key") != std::string::npos);
    CHECK(message_of("sequence: {channels: {drift: 0.9}}\n").find("sequence.channels.drift") != std::string::npos);
    CHECK(message_of("bogus: 1\n").find("bogus") != std::string::npos);
}

TEST_CASE("malformed values are rejected") {
    CHECK_FALSE(message_of("link: {length_km: abc}\n").empty());
    CHECK_FALSE(message_of("link: {eta_qfc: 1.5}\n").empty());
    CHECK_FALSE(message_of("link: [1, 2]\n").empty());
    CHECK_FALSE(message_of("simulate: {mode: sideways}\n").empty());
    CHECK_FALSE(message_of("rate: {sweep: {start_km: 50, stop_km: 0}}\n").empty());
    CHECK_FALSE(message_of("coherence: {memory: {shape: cubic}}\n").empty());
    CHECK_FALSE(message_of("link: {length_km: [\n").empty());
}

TEST_CASE("sweep lengths") {
    LengthSweep s{0.0, 1.0, 0.5};
    CHECK(s.lengths() == std::vector<double>{0.0, 0.5, 1.0});
    LengthSweep single{0.0, 0.0, 1.0};
    CHECK(single.lengths() == std::vector<double>{0.0});
    LengthSweep down{5.0, 1.0, 1.0};
    CHECK_THROWS_AS(down.lengths(), ConfigError);
}

TEST_CASE("JSON echo round-trips") {
    for (const char* name : {"paper-5km", "paper-50km", "paper-101km"}) {
        CAPTURE(name);
        const auto cfg = load_scenario(find_preset(name));
        const auto text = to_json_text(cfg);
        CHECK(to_json_text(parse_scenario(text)) == text);
    }
}

}
