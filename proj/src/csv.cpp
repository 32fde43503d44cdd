#include "envcva/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "envcva/error.hpp"

namespace envcva::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) s.remove_suffix(1);
    return s;
}

std::string where(const std::filesystem::path& source, std::size_t line) {
    return source.string() + ":" + std::to_string(line);
}

} // namespace

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
        out.emplace_back(trim(field));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Table read(const std::filesystem::path& path, const std::vector<std::string>& expected_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    Table table;
    table.source = path;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!have_header) {
            if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
            table.header = split_line(line);
            if (table.header != expected_header) {
                std::string want;
                for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
                throw DataError(where(path, line_no) + ": expected header `" + want + "`");
            }
            have_header = true;
            continue;
        }
        Row row{line_no, split_line(line)};
        if (row.fields.size() != expected_header.size())
            throw DataError(where(path, line_no) + ": expected " + std::to_string(expected_header.size()) +
                            " fields, found " + std::to_string(row.fields.size()));
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw DataError(path.string() + ": empty file");
    return table;
}

double parse_double(std::string_view text, const std::filesystem::path& source, std::size_t line) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw DataError(where(source, line) + ": malformed number `" + std::string(text) + "`");
    return value;
}

long parse_long(std::string_view text, const std::filesystem::path& source, std::size_t line) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError(where(source, line) + ": malformed integer `" + std::string(text) + "`");
    return value;
}

bool is_missing(std::string_view text) {
    return text.empty() || text == "." || text == "NA" || text == "NaN" || text == "nan" || text == "#N/A";
}

} // namespace envcva::csv
