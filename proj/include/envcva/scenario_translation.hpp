#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "envcva/credit_curves.hpp"
#include "envcva/market_data.hpp"

namespace envcva {

enum class TailMode { one_sided, two_sided };

std::string to_string(TailMode mode);
TailMode parse_tail_mode(const std::string& text);

// Driver path on the engine grid plus its base-year value x(t0).
struct DriverSeries {
    double base_value = 1.0;
    std::vector<double> values;
};
using DriverSet = std::map<std::string, DriverSeries>;

// Overflow guard for the otherwise unclipped climate multiplier.
inline constexpr double kClimateSafetyCap = 1e6;

struct ClimateTranslation {
    MultiplierPath path;
    bool safety_cap_hit = false;
};

// m_s = exp(sum_k beta_k ln(x_sk/x_sk(t0))) / (same for the reference).
ClimateTranslation climate_multiplier(const DriverSet& scenario, const DriverSet& reference,
                                      const std::map<std::string, double>& betas, const std::vector<double>& grid,
                                      const std::string& scenario_id);

// stress(t) = x(t0) / x(t) with x(t0) = x.front().
std::vector<double> policy_stress(std::span<const double> indicator);

// Reciprocal map for indicators where larger means worse.
std::vector<double> to_good_state(std::span<const double> indicator);

// clip((stress_s / stress_ref)^beta, clip). Annual paths, index 0 is the base year.
MultiplierPath nature_policy_multiplier(std::span<const double> indicator_s, std::span<const double> indicator_ref,
                                        double beta, ClipBounds clip, const std::string& scenario_id);

struct TwoStageParams {
    double omega = 1.0;        // exposure share to the affected region
    double alpha_catch = 1.0;
    double alpha_price = 1.0;
    double cost_share = 0.65;  // c in (0,1)
    double beta_pd = 2.0;
    ClipBounds hazard_clip{0.2, 8.0};
    double k_recovery = 0.05;
    double base_recovery = 0.40;
    ClipBounds recovery_clip{0.05, 0.60};

    void validate() const;
};

struct TwoStageResult {
    MultiplierPath multiplier;
    RecoveryPath recovery;
    std::vector<double> badness;          // u_s(t); +inf where the margin is wiped out
    std::size_t wiped_out_points = 0;     // e <= 0, pinned at (m_max, R_min)
};

// Physical ratio -> revenue -> EBITDA-like margin -> (hazard multiplier, recovery).
// `price_proxy` may be empty (treated as 1).
TwoStageResult two_stage_transmission(std::span<const double> physical_ratio, std::span<const double> price_proxy,
                                      const TwoStageParams& params, const std::vector<double>& grid,
                                      const std::string& scenario_id);

struct TailFactorEnsemble {
    std::vector<std::string> providers;
    std::vector<int> years;
    std::vector<std::vector<double>> factors; // [provider][year]
    TailMode mode = TailMode::two_sided;
};

// f_i(t) = g_i(t) / median_j g_j(t); one-sided mode floors at 1.
TailFactorEnsemble tail_factors(const std::vector<ProviderPathPanel>& panels, TailMode mode);

// clip((stress_s * f / stress_ref)^beta, clip) on aligned annual grids.
MultiplierPath hybrid_multiplier(std::span<const double> stress_s, std::span<const double> stress_ref,
                                 std::span<const double> factor, double beta, ClipBounds clip,
                                 const std::string& scenario_id);

// Maps an annual path (index k = base year + k) to the engine grid as a step
// function constant within each calendar year, flat past the last year.
std::vector<double> annual_to_grid(std::span<const double> annual, const std::vector<double>& grid);
MultiplierPath annual_to_grid(const MultiplierPath& annual, const std::vector<double>& grid);
RecoveryPath annual_to_grid(const RecoveryPath& annual, const std::vector<double>& grid);

MultiplierPath unit_multiplier(const std::vector<double>& grid, const std::string& scenario_id);

} // namespace envcva
