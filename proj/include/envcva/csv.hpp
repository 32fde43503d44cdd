#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace envcva::csv {

struct Row {
    std::size_t line = 0; // 1-based line number in the source file
    std::vector<std::string> fields;
};

struct Table {
    std::filesystem::path source;
    std::vector<std::string> header;
    std::vector<Row> rows;
};

// Reads a comma-separated file whose header must equal `expected_header`.
// Blank lines are skipped; surrounding whitespace of fields is trimmed.
Table read(const std::filesystem::path& path, const std::vector<std::string>& expected_header);

std::vector<std::string> split_line(std::string_view line);

// Strict numeric parsing; throws DataError naming the source line.
double parse_double(std::string_view text, const std::filesystem::path& source, std::size_t line);
long parse_long(std::string_view text, const std::filesystem::path& source, std::size_t line);

// True for the empty field and the usual missing-value markers ("." , "NA", "NaN").
bool is_missing(std::string_view text);

} // namespace envcva::csv
