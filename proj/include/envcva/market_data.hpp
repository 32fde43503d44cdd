#pragma once

#include <chrono>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace envcva {

using Date = std::chrono::sys_days;

Date parse_iso_date(std::string_view text);
std::string format_iso_date(Date d);

struct YieldQuote {
    double tenor_years;
    double yield; // decimal, continuously compounded
};

struct YieldQuoteSet {
    std::string as_of_date;
    std::vector<YieldQuote> quotes; // strictly increasing tenors

    void validate() const;
};

// Log-linear discount factors on the quoted tenors (piecewise-flat forwards),
// flat continuously compounded zero rate beyond the last node.
class DiscountCurve {
public:
    DiscountCurve(std::vector<double> tenors, std::vector<double> log_dfs);

    static DiscountCurve flat(double rate);

    double df(double t) const;
    double log_df(double t) const;
    double zero_rate(double t) const;

    // Instantaneous forward f(0,t) by central differences of log DF with step h
    // (one-sided near t = 0).
    double instantaneous_forward(double t, double h) const;

    const std::vector<double>& tenors() const { return tenors_; }
    const std::vector<double>& log_dfs() const { return log_dfs_; }

private:
    std::vector<double> tenors_;  // includes the t = 0 node
    std::vector<double> log_dfs_;
};

YieldQuoteSet load_yield_quotes(const std::filesystem::path& path);
DiscountCurve build_discount_curve(const YieldQuoteSet& quotes);

struct DailySeries {
    std::string label;
    std::vector<Date> dates; // strictly increasing
    std::vector<double> values;

    std::size_t size() const { return dates.size(); }
};

// `date,value` file; rows with a missing value are dropped.
DailySeries load_daily_series(const std::filesystem::path& path, std::string label = {});

struct ScenarioDriverPanel {
    std::string scenario_id;
    std::string driver_id;
    std::string region;
    std::vector<int> years;
    std::vector<double> values; // strictly positive
    std::vector<std::string> source_models;

    double value_at_year(int year) const;
};

// Long-format `model,scenario,region,variable,year,value`; per-year median across models.
ScenarioDriverPanel load_scenario_drivers(const std::filesystem::path& path, const std::string& scenario,
                                          const std::string& driver, const std::string& region);

// Linear between annual nodes, flat in level beyond the last node. Grid is in
// calendar years; points before the first node are an error.
std::vector<double> interpolate_to_grid(const ScenarioDriverPanel& panel, std::span<const double> calendar_years);

struct ProviderPathPanel {
    std::string provider_label;
    std::vector<int> years;
    std::vector<double> stress_values; // value(base year) == 1
};

ProviderPathPanel normalize_provider(ProviderPathPanel panel, int base_year);

// `provider,year,value`; each path divided by its base-year value. Providers keep file order.
std::vector<ProviderPathPanel> load_provider_paths(const std::filesystem::path& path, int base_year);

} // namespace envcva
