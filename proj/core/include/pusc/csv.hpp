#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pusc::csv {

/// A parsed comma-delimited table: one header row plus data rows.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position or -1.
    long column(std::string_view name) const noexcept;
};

/// Reads the whole file. Lines starting with '#' are skipped. Throws
/// IoError if the file cannot be opened and FormatError on ragged rows.
Table read(const std::filesystem::path& path);

std::vector<std::string> split_line(std::string_view line);

/// 17-significant-digit, locale-independent text for a double.
std::string format_double(double value);

/// Fixed-point with `decimals` digits.
std::string format_fixed(double value, int decimals);

/// Strict parse of a whole cell; throws FormatError naming `context`.
double parse_double(std::string_view cell, const std::string& context);
int parse_label(std::string_view cell, const std::string& context);

} // namespace pusc::csv
