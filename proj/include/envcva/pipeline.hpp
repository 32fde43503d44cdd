#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "envcva/credit_curves.hpp"

namespace envcva::pipeline {

enum class Command { climate, nature, case_study, commodity, calibrate_eps, wwr_sweep };

std::string to_string(Command c);
Command parse_command(const std::string& text);

inline constexpr int kSchemaVersion = 1;

struct GridConfig {
    double horizon = 30.0;
    double dt = 0.25;
};

struct CurveConfig {
    std::optional<std::filesystem::path> yields;
    double flat_rate = 0.04; // used when no yield file is given
};

struct CreditConfig {
    std::optional<double> spread;  // CDS par spread; calibrates lambda0
    std::optional<double> lambda0; // direct flat intensity
    double recovery = 0.4;
    double maturity = 5.0;
    int premium_frequency = 4;
};

struct TradeConfig {
    double notional = 1e7;
    double maturity = 30.0;
    int frequency = 4;
    std::optional<double> fixed_rate; // empty: at-market
    bool payer_fixed = true;
};

struct Hw1fConfig {
    double a = 0.5;
    double sigma = 0.01;
};

struct McConfig {
    std::size_t exposure_paths = 50000;
    std::size_t loss_draws = 50000;
};

struct WwrConfig {
    std::vector<double> epsilons{0.003};
    std::optional<double> calibrated_epsilon;
    std::vector<double> sweep{0.01, 0.05, 0.1, 0.2};
    std::optional<std::string> headline; // defaults to the last scenario
};

// Piecewise-linear multiplier in time with m(0) = 1 implied when t = 0 is absent.
struct ExplicitMultiplier {
    std::vector<double> times;
    std::vector<double> values;
};

struct ClimateConfig {
    std::string reference;
    std::vector<std::string> scenarios;
    std::optional<std::filesystem::path> drivers;
    std::string region = "World";
    std::map<std::string, double> betas{{"GDP|PPP", -0.6}, {"Price|Carbon", 0.15}};
    std::vector<double> report_horizons{5.0, 10.0, 20.0, 30.0};
    std::map<std::string, ExplicitMultiplier> multipliers;
};

struct ProviderSource {
    std::string label;
    std::filesystem::path path;
};

struct NatureConfig {
    std::filesystem::path indicators;
    std::string variable = "intactness";
    std::string region = "Global";
    std::string reference;
    std::vector<std::string> scenarios;
    double beta = 1.0;
    ClipBounds clip{0.05, 20.0};
    bool bad_is_up = false;
    std::vector<ProviderSource> providers;
    std::vector<std::string> modes{"one-sided", "two-sided"};
    std::vector<std::string> wwr_modes{"two-sided"};
    double epsilon = 0.003;
    std::vector<double> quantiles{0.50, 0.95, 0.99};
    std::size_t histogram_bins = 30;
};

struct CaseStudyConfig {
    std::filesystem::path members;
    double lambda0 = 0.0155;
    double omega = 1.0;
    double alpha_catch = 1.0;
    double alpha_price = 1.0;
    double cost_share = 0.65;
    double beta_pd = 2.0;
    ClipBounds hazard_clip{0.2, 8.0};
    double k_r = 0.05;
    double r0 = 0.40;
    ClipBounds recovery_clip{0.05, 0.60};
};

struct CommodityConfig {
    std::filesystem::path forwards;
    std::vector<std::string> models{"1F"}; // "1F" and/or "2F"
    double sigma0 = 0.35;
    double kappa = 1.0;
    double sigma2_ratio = 0.15;
    double rho_f = 0.0;
    double shift = 0.85;
    double maturity = 5.0;
    double dt = 1.0 / 12.0;
    double volume = 1.0;
    std::optional<double> fixed_price; // empty: initial curve average
    std::string stress_scenario;       // climate scenario driving lambda1
};

struct CalibrationConfig {
    std::filesystem::path proxy;
    std::filesystem::path spread;
    std::size_t window = 60;
    std::size_t vol_window = 20;
    double vol_quantile = 0.90;
    double tail_quantile = 0.95;
    std::string side = "short";
    std::vector<double> eps_grid{0.0, 0.0025, 0.005, 0.01, 0.015, 0.02, 0.03, 0.05, 0.075, 0.1};
    std::vector<double> rho_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::size_t copula_draws = 50000;
    std::string scenario; // defaults to the headline climate scenario
};

struct RunConfig {
    std::filesystem::path base_dir; // relative input paths resolve here
    std::string config_text;        // canonical echo of the input document
    std::string as_of;
    int base_year = 2025;
    std::uint64_t seed = 0;
    GridConfig grid;
    CurveConfig curve;
    CreditConfig credit;
    TradeConfig trade;
    Hw1fConfig hw1f;
    McConfig mc;
    WwrConfig wwr;
    std::optional<ClimateConfig> climate;
    std::optional<NatureConfig> nature;
    std::optional<CaseStudyConfig> case_study;
    std::optional<CommodityConfig> commodity;
    std::optional<CalibrationConfig> calibration;

    std::filesystem::path resolve(const std::filesystem::path& p) const;
};

// Throws ValidationError on schema or invariant violations.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Resolved settings, including every default, as a JSON document.
std::string resolved_config_json(const RunConfig& cfg);

struct RunOptions {
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed; // overrides the config seed
    bool export_exposures = false;
};

struct RunOutcome {
    std::string command;
    std::vector<std::string> files; // written into out_dir, sorted
    std::string run_json;
};

// Runs one command and writes run.json, timing.json, tables and figures into
// out_dir. On failure after validation, run.json records the structured error
// before the exception propagates.
RunOutcome run(Command command, const RunConfig& cfg, const RunOptions& options);

std::string sha256_file(const std::filesystem::path& path);

} // namespace envcva::pipeline
