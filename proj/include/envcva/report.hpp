#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace envcva::report {

// Shortest decimal that round-trips to the same double; "nan", "inf", "-inf"
// for non-finite values.
std::string format_number(double x);

struct Cell {
    std::string text;

    Cell(double x) : text(format_number(x)) {}
    Cell(int x) : text(std::to_string(x)) {}
    Cell(long x) : text(std::to_string(x)) {}
    Cell(std::size_t x) : text(std::to_string(x)) {}
    Cell(bool x) : text(x ? "true" : "false") {}
    Cell(const char* s) : text(s) {}
    Cell(std::string s) : text(std::move(s)) {}
};

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<Cell> row);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t size() const { return rows_.size(); }

    std::string to_string() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
};

// Static SVG, fixed 640x400 canvas. Output depends only on the inputs.
std::string line_chart(const Chart& chart, const std::vector<Series>& series);

// Grouped bars: one group per category, one bar per series (series[k].y[category]).
std::string bar_chart(const Chart& chart, const std::vector<std::string>& categories,
                      const std::vector<Series>& series);

// Overlaid step histograms of series[k].y on a shared binning.
std::string histogram(const Chart& chart, const std::vector<Series>& samples, std::size_t bins);

void write_text(const std::filesystem::path& path, const std::string& content);

} // namespace envcva::report
