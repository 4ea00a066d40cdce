#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "cishtex/error.hpp"

namespace cishtex::csv {

/// Shortest form is not needed; 17 significant digits always round-trips.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column, or -1.
    int column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }

    int require_column(std::string_view name, const std::string& source) const {
        const int c = column(name);
        if (c < 0) throw InvalidInput(source + ": missing column '" + std::string(name) + "'");
        return c;
    }
};

inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
        cells.emplace_back(cell);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

/// Parses a headered CSV without quoting. Blank lines are skipped; CRLF is accepted.
inline Table parse(std::string_view text, const std::string& source) {
    Table t;
    bool have_header = false;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        start = end + 1;
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            if (end == text.size()) break;
            continue;
        }
        auto cells = split_line(line);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
        } else {
            if (cells.size() != t.header.size())
                throw InvalidInput(source + ":" + std::to_string(line_no) + ": expected " +
                                   std::to_string(t.header.size()) + " cells, got " +
                                   std::to_string(cells.size()));
            t.rows.push_back(std::move(cells));
        }
        if (end == text.size()) break;
    }
    if (!have_header) throw InvalidInput(source + ": empty CSV");
    return t;
}

inline double to_double(const std::string& cell, const std::string& source) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size())
        throw InvalidInput(source + ": not a number: '" + cell + "'");
    return v;
}

inline long long to_int(const std::string& cell, const std::string& source) {
    long long v = 0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || cell.empty())
        throw InvalidInput(source + ": not an integer: '" + cell + "'");
    return v;
}

}  // namespace cishtex::csv
