#include <doctest.h>

#include <clocale>
#include <cmath>
#include <limits>
#include <locale>
#include <sstream>

#include "atomlink/error.hpp"
#include "atomlink/report.hpp"
#include "atomlink/rng.hpp"

using namespace atomlink;
using namespace atomlink::report;

TEST_SUITE("report") {

TEST_CASE("numbers round-trip") {
    for (double v : {0.0, -1.5, 1e-300, 0.1, 602.1090909090909, 6.02214076e23}) {
        CHECK(parse_number(format_number(v)) == v);
    }
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(std::isinf(parse_number("inf")));
    CHECK_THROWS_AS(parse_number("1,5"), ParameterError);
}

TEST_CASE("output ignores the process locale") {
    // de_DE may be missing in minimal images; the C++ global locale is enough
    // to catch stream-based formatting.
    const char* prev = std::setlocale(LC_ALL, nullptr);
    const std::string saved = prev ? prev : "C";
    std::setlocale(LC_ALL, "de_DE.UTF-8");
    std::ostringstream out;
    struct comma : std::numpunct<char> {
        char do_decimal_point() const override { return ','; }
    };
    out.imbue(std::locale(std::locale::classic(), new comma));
    CsvWriter w(out, {"x", "label"});
    w.row({1.25, std::string("a,b")});
    std::setlocale(LC_ALL, saved.c_str());
    CHECK(out.str() == "x,label\n1.25,\"a,b\"\n");
}

TEST_CASE("CSV reading skips comments and unquotes") {
    std::ostringstream out;
    CsvWriter w(out, {"a", "b"}, "line one\nline two");
    w.row({std::int64_t{-3}, std::string("say \"hi\"")});
    w.row({std::uint64_t{7}, 0.5});
    CHECK(w.rows() == 2);
    const auto rows = read_csv(out.str());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"a", "b"});
    CHECK(rows[1] == std::vector<std::string>{"-3", "say \"hi\""});
    CHECK(rows[2][1] == "0.5");
    CHECK_THROWS_AS(w.row({1.0}), ParameterError);
    CHECK(csv_escape("plain") == "plain");
}

}

TEST_SUITE("rng") {

TEST_CASE("streams are reproducible and distinct") {
    Rng a(5, 1);
    Rng b(5, 1);
    Rng c(5, 2);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        REQUIRE(x == b.uniform());
        differs |= x != c.uniform();
    }
    CHECK(differs);
    Rng d1 = Rng(5).derive(3);
    Rng d2 = Rng(5).derive(3);
    CHECK(d1.uniform() == d2.uniform());
}

TEST_CASE("distribution moments") {
    Rng r(11);
    const int n = 200000;
    double sum_u = 0.0;
    double sum_g = 0.0;
    double sum_e = 0.0;
    std::uint64_t bern = 0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum_u += u;
        sum_g += static_cast<double>(r.geometric(0.1));
        sum_e += r.exponential(3.0);
        bern += r.bernoulli(0.3) ? 1 : 0;
    }
    CHECK(sum_u / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sum_g / n == doctest::Approx(10.0).epsilon(0.02));
    CHECK(sum_e / n == doctest::Approx(3.0).epsilon(0.02));
    CHECK(static_cast<double>(bern) / n == doctest::Approx(0.3).epsilon(0.02));
    CHECK(r.geometric(1.0) == 1);
    CHECK_THROWS_AS(r.geometric(0.0), ParameterError);
    const std::array<double, 3> w{0.0, 1.0, 0.0};
    CHECK(r.categorical(w) == 1);
    const std::array<double, 2> zero{0.0, 0.0};
    CHECK_THROWS_AS(r.categorical(zero), ParameterError);
    CHECK(r.binomial(1000, 0.0) == 0);
    CHECK(r.binomial(1000, 1.0) == 1000);
}

}
