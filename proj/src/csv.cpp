#include "ewaldqft/csv.hpp"

#include "ewaldqft/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>

namespace ewaldqft {

std::string format_energy(double value) { return format_double(value, 17); }

std::string format_double(double value, int significant)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, value);
    return buf;
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            out.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    out.push_back(current);
    return out;
}

std::size_t CsvTable::column(const std::string& name) const
{
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ValidationError("CSV schema mismatch: missing column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

bool CsvTable::has_column(const std::string& name) const
{
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

double CsvTable::number(std::size_t row, const std::string& name) const
{
    const std::string& cell = text(row, name);
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("CSV column '" + name + "' row " + std::to_string(row) + " is not numeric: '" + cell +
                              "'");
    }
}

const std::string& CsvTable::text(std::size_t row, const std::string& name) const
{
    return rows.at(row).at(column(name));
}

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t#");
                const auto e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
            };
            table.meta[trim(line.substr(0, colon))] = trim(line.substr(colon + 1));
            continue;
        }
        auto cells = split(line, ',');
        if (table.columns.empty()) {
            table.columns = std::move(cells);
        } else {
            if (cells.size() != table.columns.size())
                throw ValidationError("CSV row " + std::to_string(table.rows.size()) + " has " +
                                      std::to_string(cells.size()) + " cells, header has " +
                                      std::to_string(table.columns.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.columns.empty()) throw ValidationError("CSV has no header row");
    return table;
}

} // namespace ewaldqft
