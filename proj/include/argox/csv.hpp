#pragma once

#include <string>
#include <vector>

namespace argox {

/// Comma-separated table with a header row. No quoting: the file formats
/// here never embed commas in fields.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index for `name`; throws ParseError when absent.
    size_t col(const std::string& name) const;
    bool has_col(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

/// Shortest decimal digits that round-trip a double ("%.17g" fallback).
std::string format_double(double v);

/// Fixed-precision formatting for report tables.
std::string format_fixed(double v, int digits);

}  // namespace argox
