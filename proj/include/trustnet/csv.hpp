#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace trustnet::csv {

// RFC 4180 quoting: fields containing a comma, quote or newline are quoted.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Splits one physical line. Quoted fields may contain commas and doubled quotes
// but not newlines.
std::vector<std::string> split_line(std::string_view line);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column position by name; throws trustnet::Error if absent.
    std::size_t column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);

// Shortest representation that round-trips through strtod.
std::string format_double(double value);

// Fixed number of decimals, used by report tables shown to people.
std::string format_fixed(double value, int decimals);

} // namespace trustnet::csv
