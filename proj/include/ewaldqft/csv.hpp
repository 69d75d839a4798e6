#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ewaldqft {

inline constexpr int kSchemaVersion = 1;

/// 17 significant digits.
std::string format_energy(double value);
std::string format_double(double value, int significant = 10);

std::vector<std::string> split(const std::string& text, char sep);

/// Parsed CSV: `# key: value` comment lines, a header row and data rows.
struct CsvTable {
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name` in columns; throws ValidationError when absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
    const std::string& text(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

} // namespace ewaldqft
