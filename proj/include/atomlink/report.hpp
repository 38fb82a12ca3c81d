#pragma once

// Locale-independent text output. Numbers go through std::to_chars, so the
// decimal separator never depends on the process locale.

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace atomlink::report {

/// Shortest round-trip representation; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double v);

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

class CsvWriter {
public:
    /// Writes `echo` (e.g. the resolved configuration) as "# "-prefixed lines,
    /// then the header row.
    CsvWriter(std::ostream& out, const std::vector<std::string>& columns, std::string_view echo = {});

    void row(const std::vector<Cell>& cells);
    std::size_t rows() const { return rows_; }

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t rows_ = 0;
};

std::string csv_escape(std::string_view field);

/// Splits CSV text into rows of fields, skipping "#" comment lines.
std::vector<std::vector<std::string>> read_csv(std::string_view text);

/// Parses a number written by format_number.
double parse_number(std::string_view text);

} // namespace atomlink::report
