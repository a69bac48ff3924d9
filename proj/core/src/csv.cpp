#include "pusc/csv.hpp"

#include "pusc/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace pusc::csv {

long Table::column(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return static_cast<long>(i);
        }
    }
    return -1;
}

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.emplace_back(line.substr(start));
            break;
        }
        cells.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    Table table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto cells = split_line(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw FormatError(path.string() + ": line " + std::to_string(line_no) + " has " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) {
        throw FormatError(path.string() + ": missing header row");
    }
    return table;
}

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    if (ec != std::errc{}) {
        throw FormatError("format_double: conversion failed");
    }
    return std::string(buf, end);
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    // -0.00 reads badly in tables.
    if (std::abs(value) < 0.5 * std::pow(10.0, -decimals)) {
        value = 0.0;
    }
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
    if (ec != std::errc{}) {
        throw FormatError("format_fixed: conversion failed");
    }
    return std::string(buf, end);
}

double parse_double(std::string_view cell, const std::string& context) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || cell.empty() || !std::isfinite(value)) {
        throw FormatError(context + ": non-numeric cell '" + std::string(cell) + "'");
    }
    return value;
}

int parse_label(std::string_view cell, const std::string& context) {
    const double v = parse_double(cell, context);
    if (v == 1.0) {
        return 1;
    }
    if (v == -1.0) {
        return -1;
    }
    throw FormatError(context + ": label must be -1 or 1, got '" + std::string(cell) + "'");
}

} // namespace pusc::csv
