#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "lagdeconv/error.hpp"

namespace lagdeconv::csv {

/// Numeric table read from CSV: header names plus rows of doubles, each row
/// remembering its 1-based source line.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> lines;
    std::size_t header_line = 0;

    std::size_t size() const noexcept { return rows.size(); }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.at(j));
        return out;
    }
};

namespace detail {
inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}
}  // namespace detail

/// Header row required; blank lines and lines starting with '#' are skipped.
inline Table read(std::istream& in, const std::string& source = {}) {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto s = detail::trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto cells = detail::split(s);
        if (!have_header) {
            for (auto c : cells) t.header.emplace_back(c);
            t.header_line = lineno;
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw ParseError("expected " + std::to_string(t.header.size()) + " columns, found " +
                                 std::to_string(cells.size()),
                             lineno, source);
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (auto c : cells) {
            double v = 0.0;
            const auto* end = c.data() + c.size();
            const auto [ptr, ec] = std::from_chars(c.data(), end, v);
            if (c.empty() || ec != std::errc() || ptr != end) {
                throw ParseError("non-numeric value '" + std::string(c) + "'", lineno, source);
            }
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
        t.lines.push_back(lineno);
    }
    if (!have_header) throw ParseError("empty file: no header row", lineno == 0 ? 1 : lineno, source);
    if (t.rows.empty()) throw ParseError("no data rows after the header", lineno, source);
    return t;
}

inline Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read(in, path);
}

/// Two-column (time, value) series. Extra columns are rejected.
struct Series {
    std::vector<double> t;
    std::vector<double> v;
    std::vector<std::size_t> lines;
};

inline Series read_series(const std::string& path) {
    const Table tab = read_file(path);
    if (tab.header.size() != 2) {
        throw ParseError("expected 2 columns (time, value), found " + std::to_string(tab.header.size()),
                         tab.header_line, path);
    }
    return {tab.column(0), tab.column(1), tab.lines};
}

/// Shortest round-trip representation of a double.
inline std::string format(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

/// Writes "# schema: <name> v<version>", the header, then rows.
class Writer {
public:
    Writer(std::ostream& out, const std::string& schema, int version, const std::vector<std::string>& header)
        : out_(out), width_(header.size()) {
        out_ << "# schema: " << schema << " v" << version << '\n';
        for (std::size_t j = 0; j < header.size(); ++j) out_ << (j ? "," : "") << header[j];
        out_ << '\n';
    }

    void comment(const std::string& text) { out_ << "# " << text << '\n'; }

    template <class... Cells>
    void row(const Cells&... cells) {
        static_assert(sizeof...(Cells) > 0);
        std::size_t j = 0;
        ((out_ << (j++ ? "," : "") << cell(cells)), ...);
        if (j != width_) throw Error("csv::Writer: row width does not match header");
        out_ << '\n';
    }

private:
    static std::string cell(double v) { return format(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <class I>
        requires std::is_integral_v<I>
    static std::string cell(I v) {
        return std::to_string(v);
    }

    std::ostream& out_;
    std::size_t width_;
};

}  // namespace lagdeconv::csv
