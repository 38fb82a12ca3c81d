#include "atomlink/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "atomlink/error.hpp"

namespace atomlink::report {

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& columns, std::string_view echo)
    : out_(out), columns_(columns.size()) {
    if (!echo.empty()) {
        std::size_t start = 0;
        while (start <= echo.size()) {
            const auto end = echo.find('\n', start);
            const auto line = echo.substr(start, end == std::string_view::npos ? echo.size() - start : end - start);
            out_ << "# " << line << '\n';
            if (end == std::string_view::npos) {
                break;
            }
            start = end + 1;
        }
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out_ << (i ? "," : "") << csv_escape(columns[i]);
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_) {
        throw ParameterError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(columns_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) {
            out_ << ',';
        }
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>) {
                    out_ << format_number(v);
                } else if constexpr (std::is_same_v<T, std::string>) {
                    out_ << csv_escape(v);
                } else {
                    char buf[32];
                    const auto res = std::to_chars(buf, buf + sizeof buf, v);
                    out_.write(buf, res.ptr - buf);
                }
            },
            cells[i]);
    }
    out_ << '\n';
    ++rows_;
}

std::vector<std::vector<std::string>> read_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] == '#') {
            const auto end = text.find('\n', pos);
            pos = end == std::string_view::npos ? text.size() : end + 1;
            continue;
        }
        std::vector<std::string> row;
        std::string field;
        bool quoted = false;
        for (; pos < text.size(); ++pos) {
            const char c = text[pos];
            if (quoted) {
                if (c == '"' && pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    ++pos;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                row.push_back(std::move(field));
                field.clear();
            } else if (c == '\n') {
                ++pos;
                break;
            } else if (c != '\r') {
                field += c;
            }
        }
        row.push_back(std::move(field));
        if (!(row.size() == 1 && row[0].empty())) {
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

double parse_number(std::string_view text) {
    if (text == "nan") {
        return std::nan("");
    }
    if (text == "inf") {
        return INFINITY;
    }
    if (text == "-inf") {
        return -INFINITY;
    }
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParameterError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

} // namespace atomlink::report
