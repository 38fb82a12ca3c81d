#include <doctest.h>

#include <vector>

#include "atomlink/error.hpp"
#include "atomlink/rate.hpp"

using namespace atomlink;
using namespace atomlink::rate;

TEST_SUITE("rate") {

TEST_CASE("zero-length period is the component sum") {
    const TimingBudget b;
    CHECK(b.zero_length_period_us() == 3.0 + 0.2 + 8.0 + 6500.0 / 11.0);
    CHECK(attempt_period_us(b, 0.0, 2e5) == b.zero_length_period_us());
}

TEST_CASE("repetition rates at the link lengths") {
    const TimingBudget b;
    const double c = link::LinkParams{}.fiber_speed_km_per_s;
    CHECK(max_repetition_rate_hz(b, 5.0, c) == doctest::Approx(1590.0).epsilon(0.03));
    CHECK(max_repetition_rate_hz(b, 50.0, c) == doctest::Approx(1180.0).epsilon(0.03));
    CHECK(max_repetition_rate_hz(b, 101.0, c) == doctest::Approx(910.0).epsilon(0.03));
}

TEST_CASE("rate is the duty-cycled product") {
    const TimingBudget b;
    link::LinkParams p;
    p.length_km = 50.0;
    const auto r = entanglement_rate(b, p, 0.5);
    CHECK(r.rate_per_s == doctest::Approx(0.5 * r.repetition_hz * r.eta));
    CHECK(r.eta == doctest::Approx(link::signal_click_probability(p)));
    CHECK(r.period_us == doctest::Approx(1e6 / r.repetition_hz));
}

TEST_CASE("sweep and validation") {
    const std::vector<double> km{0.0, 101.0};
    const auto rows = rate_sweep(TimingBudget{}, link::LinkParams{}, 0.5, km);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].rate_per_s > rows[1].rate_per_s);
    TimingBudget bad;
    bad.attempts_per_cooling = 0;
    CHECK_THROWS_AS(attempt_period_us(bad, 0.0, 2e5), ParameterError);
    CHECK_THROWS_AS(entanglement_rate(TimingBudget{}, link::LinkParams{}, 1.5), ParameterError);
}

}
