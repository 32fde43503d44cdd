#include "envcva/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "envcva/csv.hpp"
#include "envcva/error.hpp"
#include "envcva/stats.hpp"

namespace envcva {

Date parse_iso_date(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    const std::string s(text);
    if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3)
        throw DataError("malformed ISO date `" + s + "`");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw DataError("invalid calendar date `" + s + "`");
    return Date{ymd};
}

std::string format_iso_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

void YieldQuoteSet::validate() const {
    if (quotes.size() < 2) throw ValidationError("yield quote set needs at least 2 quotes");
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        if (!(quotes[i].tenor_years > 0.0) || !std::isfinite(quotes[i].tenor_years))
            throw ValidationError("yield tenors must be positive");
        if (!std::isfinite(quotes[i].yield)) throw ValidationError("yield must be finite");
        if (i > 0 && !(quotes[i].tenor_years > quotes[i - 1].tenor_years)) {
            if (quotes[i].tenor_years == quotes[i - 1].tenor_years)
                throw ValidationError("duplicate tenor " + std::to_string(quotes[i].tenor_years));
            throw ValidationError("yield tenors must be strictly increasing");
        }
    }
}

DiscountCurve::DiscountCurve(std::vector<double> tenors, std::vector<double> log_dfs)
    : tenors_(std::move(tenors)), log_dfs_(std::move(log_dfs)) {
    if (tenors_.size() != log_dfs_.size() || tenors_.size() < 2)
        throw ValidationError("discount curve needs matching tenor/log-DF vectors with at least 2 nodes");
    if (tenors_.front() != 0.0 || log_dfs_.front() != 0.0)
        throw ValidationError("discount curve must start at DF(0) = 1");
    for (std::size_t i = 1; i < tenors_.size(); ++i)
        if (!(tenors_[i] > tenors_[i - 1])) throw ValidationError("discount curve tenors must increase");
}

DiscountCurve DiscountCurve::flat(double rate) {
    return DiscountCurve({0.0, 1.0}, {0.0, -rate});
}

double DiscountCurve::log_df(double t) const {
    if (t <= 0.0) {
        // Negative times only arise from one-sided stencils; extend the first segment.
        return log_dfs_[1] / tenors_[1] * t;
    }
    if (t >= tenors_.back()) return log_dfs_.back() / tenors_.back() * t;
    const auto it = std::upper_bound(tenors_.begin(), tenors_.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - tenors_.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - tenors_[lo]) / (tenors_[hi] - tenors_[lo]);
    return (1.0 - w) * log_dfs_[lo] + w * log_dfs_[hi];
}

double DiscountCurve::df(double t) const {
    if (t == 0.0) return 1.0;
    return std::exp(log_df(t));
}

double DiscountCurve::zero_rate(double t) const {
    if (t <= 0.0) return -log_dfs_[1] / tenors_[1];
    return -log_df(t) / t;
}

double DiscountCurve::instantaneous_forward(double t, double h) const {
    if (!(h > 0.0)) throw ValidationError("forward-rate difference step must be positive");
    if (t < h) return -(log_df(t + h) - log_df(t)) / h;
    return -(log_df(t + h) - log_df(t - h)) / (2.0 * h);
}

YieldQuoteSet load_yield_quotes(const std::filesystem::path& path) {
    const auto table = csv::read(path, {"tenor_years", "yield"});
    YieldQuoteSet set;
    for (const auto& row : table.rows) {
        set.quotes.push_back({csv::parse_double(row.fields[0], path, row.line),
                              csv::parse_double(row.fields[1], path, row.line)});
    }
    std::stable_sort(set.quotes.begin(), set.quotes.end(),
                     [](const YieldQuote& a, const YieldQuote& b) { return a.tenor_years < b.tenor_years; });
    set.validate();
    return set;
}

DiscountCurve build_discount_curve(const YieldQuoteSet& quotes) {
    quotes.validate();
    std::vector<double> tenors{0.0};
    std::vector<double> log_dfs{0.0};
    for (const auto& q : quotes.quotes) {
        tenors.push_back(q.tenor_years);
        log_dfs.push_back(-q.yield * q.tenor_years);
    }
    return DiscountCurve(std::move(tenors), std::move(log_dfs));
}

DailySeries load_daily_series(const std::filesystem::path& path, std::string label) {
    const auto table = csv::read(path, {"date", "value"});
    DailySeries series;
    series.label = label.empty() ? path.stem().string() : std::move(label);
    for (const auto& row : table.rows) {
        if (csv::is_missing(row.fields[1])) continue;
        Date d;
        try {
            d = parse_iso_date(row.fields[0]);
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(row.line) + ": " + e.what());
        }
        if (!series.dates.empty() && !(d > series.dates.back()))
            throw DataError(path.string() + ":" + std::to_string(row.line) + ": dates must be strictly increasing");
        series.dates.push_back(d);
        series.values.push_back(csv::parse_double(row.fields[1], path, row.line));
    }
    return series;
}

double ScenarioDriverPanel::value_at_year(int year) const {
    const auto it = std::lower_bound(years.begin(), years.end(), year);
    if (it == years.end() || *it != year)
        throw DataError("driver `" + driver_id + "` for scenario `" + scenario_id + "` has no value for year " +
                        std::to_string(year));
    return values[static_cast<std::size_t>(it - years.begin())];
}

ScenarioDriverPanel load_scenario_drivers(const std::filesystem::path& path, const std::string& scenario,
                                          const std::string& driver, const std::string& region) {
    const auto table = csv::read(path, {"model", "scenario", "region", "variable", "year", "value"});
    std::map<int, std::vector<double>> by_year;
    std::vector<std::string> models;
    for (const auto& row : table.rows) {
        const auto& f = row.fields;
        if (f[1] != scenario || f[2] != region || f[3] != driver) continue;
        if (csv::is_missing(f[5])) continue;
        const int year = static_cast<int>(csv::parse_long(f[4], path, row.line));
        const double value = csv::parse_double(f[5], path, row.line);
        if (!(value > 0.0))
            throw ValidationError(path.string() + ":" + std::to_string(row.line) + ": driver values must be positive");
        by_year[year].push_back(value);
        if (std::find(models.begin(), models.end(), f[0]) == models.end()) models.push_back(f[0]);
    }
    if (by_year.empty())
        throw DataError("no data for scenario `" + scenario + "`, variable `" + driver + "`, region `" + region +
                        "` in " + path.string());
    ScenarioDriverPanel panel{scenario, driver, region, {}, {}, std::move(models)};
    for (const auto& [year, values] : by_year) {
        panel.years.push_back(year);
        panel.values.push_back(stats::median(values));
    }
    std::sort(panel.source_models.begin(), panel.source_models.end());
    return panel;
}

std::vector<double> interpolate_to_grid(const ScenarioDriverPanel& panel, std::span<const double> calendar_years) {
    if (panel.years.empty()) throw DataError("empty driver panel");
    std::vector<double> out;
    out.reserve(calendar_years.size());
    for (const double y : calendar_years) {
        if (y < panel.years.front() - 1e-9)
            throw DataError("grid year " + std::to_string(y) + " precedes first node " +
                            std::to_string(panel.years.front()) + " of driver `" + panel.driver_id + "`");
        if (y >= panel.years.back()) {
            out.push_back(panel.values.back());
            continue;
        }
        const auto it = std::upper_bound(panel.years.begin(), panel.years.end(), y,
                                         [](double a, int b) { return a < static_cast<double>(b); });
        const std::size_t hi = static_cast<std::size_t>(it - panel.years.begin());
        if (hi == 0) {
            out.push_back(panel.values.front());
            continue;
        }
        const std::size_t lo = hi - 1;
        const double w = (y - panel.years[lo]) / static_cast<double>(panel.years[hi] - panel.years[lo]);
        out.push_back(w == 0.0 ? panel.values[lo] : (1.0 - w) * panel.values[lo] + w * panel.values[hi]);
    }
    return out;
}

ProviderPathPanel normalize_provider(ProviderPathPanel panel, int base_year) {
    const auto it = std::find(panel.years.begin(), panel.years.end(), base_year);
    if (it == panel.years.end())
        throw DataError("provider `" + panel.provider_label + "` has no value for base year " + std::to_string(base_year));
    const double base = panel.stress_values[static_cast<std::size_t>(it - panel.years.begin())];
    for (const double v : panel.stress_values)
        if (!(v > 0.0)) throw ValidationError("provider `" + panel.provider_label + "` has a nonpositive value");
    for (double& v : panel.stress_values) v /= base;
    return panel;
}

std::vector<ProviderPathPanel> load_provider_paths(const std::filesystem::path& path, int base_year) {
    const auto table = csv::read(path, {"provider", "year", "value"});
    std::vector<ProviderPathPanel> panels;
    std::map<std::string, std::size_t> index;
    for (const auto& row : table.rows) {
        const auto& label = row.fields[0];
        const int year = static_cast<int>(csv::parse_long(row.fields[1], path, row.line));
        const double value = csv::parse_double(row.fields[2], path, row.line);
        if (!(value > 0.0))
            throw ValidationError(path.string() + ":" + std::to_string(row.line) + ": provider values must be positive");
        auto [it, inserted] = index.try_emplace(label, panels.size());
        if (inserted) panels.push_back({label, {}, {}});
        auto& p = panels[it->second];
        p.years.push_back(year);
        p.stress_values.push_back(value);
    }
    if (panels.empty()) throw DataError("no provider paths in " + path.string());
    for (auto& p : panels) {
        std::vector<std::size_t> order(p.years.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p.years[a] < p.years[b]; });
        ProviderPathPanel sorted{p.provider_label, {}, {}};
        for (const auto i : order) {
            if (!sorted.years.empty() && sorted.years.back() == p.years[i])
                throw DataError("provider `" + p.provider_label + "` repeats year " + std::to_string(p.years[i]));
            sorted.years.push_back(p.years[i]);
            sorted.stress_values.push_back(p.stress_values[i]);
        }
        p = normalize_provider(std::move(sorted), base_year);
    }
    return panels;
}

} // namespace envcva
