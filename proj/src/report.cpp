#include "envcva/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "envcva/error.hpp"

namespace envcva::report {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0"; // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

namespace {

std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
    return s;
}

// Tick label with a precision matched to the tick spacing.
std::string tick_label(double v, double step) {
    int digits = 0;
    if (step > 0.0 && step < 1.0) digits = std::min(8, static_cast<int>(std::ceil(-std::log10(step) + 1e-9)));
    if (std::abs(v) < step * 1e-9) v = 0.0;
    return fixed(v, digits);
}

constexpr double kWidth = 640.0, kHeight = 400.0;
constexpr double kLeft = 70.0, kRight = 150.0, kTop = 40.0, kBottom = 50.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

const char* colour(std::size_t k) { return kPalette[k % (sizeof kPalette / sizeof kPalette[0])]; }

struct Range {
    double lo = 0.0, hi = 1.0;
};

double nice_step(double span, int target) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    const double m = r <= 1.0 ? 1.0 : r <= 2.0 ? 2.0 : r <= 5.0 ? 5.0 : 10.0;
    return m * mag;
}

Range padded(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        const double pad = std::max(std::abs(hi) * 0.1, 1e-6);
        return {lo - pad, hi + pad};
    }
    return {lo, hi};
}

class Canvas {
public:
    Canvas(const Chart& chart, Range xr, Range yr, bool x_ticks = true) : xr_(xr), yr_(yr) {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
             << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
        out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out_ << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
             << xml_escape(chart.title) << "</text>\n";
        const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
        out_ << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
             << "\" stroke=\"black\"/>\n";
        out_ << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
             << "\" stroke=\"black\"/>\n";
        const double ys = nice_step(yr_.hi - yr_.lo, 5);
        for (double v = std::ceil(yr_.lo / ys) * ys; v <= yr_.hi + 1e-9 * ys; v += ys) {
            out_ << "<line x1=\"" << x0 - 4 << "\" y1=\"" << fixed(py(v)) << "\" x2=\"" << x1 << "\" y2=\""
                 << fixed(py(v)) << "\" stroke=\"#e0e0e0\"/>\n";
            out_ << "<text x=\"" << x0 - 6 << "\" y=\"" << fixed(py(v) + 4) << "\" text-anchor=\"end\">"
                 << tick_label(v, ys) << "</text>\n";
        }
        if (x_ticks) {
            const double xs = nice_step(xr_.hi - xr_.lo, 6);
            for (double v = std::ceil(xr_.lo / xs) * xs; v <= xr_.hi + 1e-9 * xs; v += xs) {
                out_ << "<line x1=\"" << fixed(px(v)) << "\" y1=\"" << y0 << "\" x2=\"" << fixed(px(v))
                     << "\" y2=\"" << y0 + 4 << "\" stroke=\"black\"/>\n";
                out_ << "<text x=\"" << fixed(px(v)) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">"
                     << tick_label(v, xs) << "</text>\n";
            }
        }
        out_ << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
             << xml_escape(chart.x_label) << "</text>\n";
        out_ << "<text transform=\"translate(16," << (y0 + y1) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
             << xml_escape(chart.y_label) << "</text>\n";
    }

    double px(double x) const { return kLeft + (x - xr_.lo) / (xr_.hi - xr_.lo) * (kWidth - kLeft - kRight); }
    double py(double y) const {
        return kHeight - kBottom - (y - yr_.lo) / (yr_.hi - yr_.lo) * (kHeight - kTop - kBottom);
    }

    void legend(std::size_t k, const std::string& label) {
        const double y = kTop + 10 + 16.0 * static_cast<double>(k);
        const double x = kWidth - kRight + 12;
        out_ << "<rect x=\"" << x << "\" y=\"" << y - 8 << "\" width=\"10\" height=\"10\" fill=\"" << colour(k)
             << "\"/>\n";
        out_ << "<text x=\"" << x + 14 << "\" y=\"" << y + 1 << "\">" << xml_escape(label) << "</text>\n";
    }

    std::ostringstream& body() { return out_; }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    Range xr_, yr_;
    std::ostringstream out_;
};

template <class F>
void for_finite(const std::vector<Series>& series, bool use_x, F&& f) {
    for (const auto& s : series) {
        const auto& v = use_x ? s.x : s.y;
        for (double d : v)
            if (std::isfinite(d)) f(d);
    }
}

Range data_range(const std::vector<Series>& series, bool use_x, bool include_zero) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for_finite(series, use_x, [&](double d) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    });
    if (lo > hi) return {0.0, 1.0};
    if (include_zero) {
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 0.0);
    }
    return padded(lo, hi);
}

} // namespace

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw ValidationError("table row width does not match header");
    std::vector<std::string> text;
    text.reserve(row.size());
    for (auto& c : row) text.push_back(std::move(c.text));
    rows_.push_back(std::move(text));
}

std::string CsvTable::to_string() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += quote_field(fields[i]);
        }
        out += '\n';
    };
    emit(header_);
    for (const auto& r : rows_) emit(r);
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, to_string()); }

std::string line_chart(const Chart& chart, const std::vector<Series>& series) {
    Canvas canvas(chart, data_range(series, true, false), data_range(series, false, true));
    auto& out = canvas.body();
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colour(k) << "\" points=\"";
        const std::size_t n = std::min(s.x.size(), s.y.size());
        bool first = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!first) out << ' ';
            out << fixed(canvas.px(s.x[i])) << ',' << fixed(canvas.py(s.y[i]));
            first = false;
        }
        out << "\"/>\n";
        canvas.legend(k, s.label);
    }
    return canvas.finish();
}

std::string bar_chart(const Chart& chart, const std::vector<std::string>& categories,
                      const std::vector<Series>& series) {
    const Range xr{0.0, static_cast<double>(std::max<std::size_t>(categories.size(), 1))};
    Canvas canvas(chart, xr, data_range(series, false, true), false);
    auto& out = canvas.body();
    const double group = canvas.px(1.0) - canvas.px(0.0);
    const double bar = group * 0.8 / static_cast<double>(std::max<std::size_t>(series.size(), 1));
    for (std::size_t c = 0; c < categories.size(); ++c) {
        out << "<text x=\"" << fixed(canvas.px(c + 0.5)) << "\" y=\"" << kHeight - kBottom + 16
            << "\" text-anchor=\"middle\">" << xml_escape(categories[c]) << "</text>\n";
        for (std::size_t k = 0; k < series.size(); ++k) {
            if (c >= series[k].y.size() || !std::isfinite(series[k].y[c])) continue;
            const double v = series[k].y[c];
            const double x = canvas.px(static_cast<double>(c)) + group * 0.1 + bar * static_cast<double>(k);
            const double top = canvas.py(std::max(v, 0.0)), base = canvas.py(std::min(v, 0.0));
            out << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(bar)
                << "\" height=\"" << fixed(base - top) << "\" fill=\"" << colour(k) << "\"/>\n";
        }
    }
    for (std::size_t k = 0; k < series.size(); ++k) canvas.legend(k, series[k].label);
    return canvas.finish();
}

std::string histogram(const Chart& chart, const std::vector<Series>& samples, std::size_t bins) {
    bins = std::max<std::size_t>(bins, 1);
    const Range xr = data_range(samples, false, false);
    const double width = (xr.hi - xr.lo) / static_cast<double>(bins);
    std::vector<Series> densities;
    double top = 0.0;
    for (const auto& s : samples) {
        std::vector<double> count(bins, 0.0);
        double n = 0.0;
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            auto b = static_cast<std::size_t>(std::floor((v - xr.lo) / width));
            count[std::min(b, bins - 1)] += 1.0;
            n += 1.0;
        }
        for (auto& c : count) {
            c = n > 0.0 ? c / n : 0.0;
            top = std::max(top, c);
        }
        densities.push_back({s.label, {}, std::move(count)});
    }
    Canvas canvas(chart, xr, padded(0.0, std::max(top, 1e-12)));
    auto& out = canvas.body();
    for (std::size_t k = 0; k < densities.size(); ++k) {
        out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colour(k) << "\" points=\"";
        out << fixed(canvas.px(xr.lo)) << ',' << fixed(canvas.py(0.0));
        for (std::size_t b = 0; b < bins; ++b) {
            const double a = xr.lo + width * static_cast<double>(b);
            const double y = canvas.py(densities[k].y[b]);
            out << ' ' << fixed(canvas.px(a)) << ',' << fixed(y) << ' ' << fixed(canvas.px(a + width)) << ','
                << fixed(y);
        }
        out << ' ' << fixed(canvas.px(xr.hi)) << ',' << fixed(canvas.py(0.0)) << "\"/>\n";
        canvas.legend(k, densities[k].label);
    }
    return canvas.finish();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + path.string());
    f << content;
    if (!f) throw DataError("write failed for " + path.string());
}

} // namespace envcva::report
