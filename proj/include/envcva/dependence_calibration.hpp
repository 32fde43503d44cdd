#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "envcva/credit_curves.hpp"
#include "envcva/cva_core.hpp"
#include "envcva/exposure.hpp"
#include "envcva/market_data.hpp"

namespace envcva {

// Kendall tau-b (tie corrected; equals tau-a without ties), O(n log n).
// Throws NumericError when either sample is constant.
double kendall_tau(std::span<const double> x, std::span<const double> y);

// Gaussian-copula latent correlation sin(pi tau / 2).
double latent_rho(double tau);

DailySeries log_returns(const DailySeries& levels);
DailySeries differences(const DailySeries& levels);

struct AlignedPair {
    std::vector<Date> dates;
    std::vector<double> x;
    std::vector<double> y;
};

// Dates present in both series, in order.
AlignedPair inner_join(const DailySeries& a, const DailySeries& b);

enum class DependenceSide { long_side, short_side };

std::string to_string(DependenceSide side);
DependenceSide parse_dependence_side(const std::string& text);

struct RollingRho {
    std::vector<Date> end_dates;
    std::vector<double> rho;
    std::vector<double> rho_long;  // max(rho, 0)
    std::vector<double> rho_short; // max(-rho, 0)
    std::vector<double> realized_vol; // daily std of x over the trailing vol window
    std::size_t window = 0;
    std::size_t vol_window = 0;
    std::size_t skipped_windows = 0; // zero variance in x or y
};

RollingRho rolling_directional_rho(const AlignedPair& data, std::size_t window, std::size_t vol_window);

struct DependenceTarget {
    double rho_target = 0.0;
    std::string regime;
    std::size_t window = 0;
    std::size_t vol_window = 0;
    double vol_quantile = 0.0;
    double tail_quantile = 0.0;
    DependenceSide side = DependenceSide::short_side;
    std::size_t windows_total = 0;
    std::size_t windows_stressed = 0;
    double vol_threshold = 0.0;
};

DependenceTarget stressed_target(const RollingRho& rolling, double vol_quantile, double tail_quantile,
                                 DependenceSide side);

struct CopulaCva {
    double rho = 0.0;
    double cva = 0.0;
    double standard_error = 0.0;
    std::vector<double> losses;              // per draw, for paired comparisons
    std::vector<std::size_t> interval_counts; // [0] survival, [i] default in (t_{i-1}, t_i]
};

// One-factor Gaussian copula between the path rank of the loss score
// Z_p = sum_i DF_i E_p(t_i) dp_i and the default time.
CopulaCva copula_diagnostic_cva(const ExposureCube& cube, const IntervalMasses& masses, const RecoveryPath& recovery,
                                double rho, std::size_t n_draws, std::uint64_t seed);

struct EquivalenceInputs {
    const ExposureCube* cube_s = nullptr;
    const ExposureCube* cube_ref = nullptr;
    SurvivalCurve survival_s;
    SurvivalCurve survival_ref;
    RecoveryPath recovery_s;
    RecoveryPath recovery_ref;
    const LossSampleSet* losses_s = nullptr;
    const LossSampleSet* losses_ref = nullptr;
    double notional = 1.0;
    std::size_t copula_draws = 0;
    std::uint64_t seed = 0;
};

struct EquivalenceCurve {
    std::vector<double> rho_grid;       // starts at 0
    std::vector<double> addon_rho;      // raw, bp
    std::vector<double> addon_rho_fit;  // isotonic, A(0) = 0
    std::vector<double> eps_grid;       // starts at 0
    std::vector<double> addon_eps;      // bp
    std::vector<double> rho_equiv;      // isotonic along eps
    std::vector<bool> saturated;        // add-on beyond the largest rho add-on
};

struct EquivalenceResult {
    EquivalenceCurve curve;
    double rho_target = 0.0;
    double eps_star = 0.0;
    double max_attainable_rho = 0.0;
};

// Inverse of an isotonic add-on map by linear interpolation; saturates at the last rho.
double invert_addon(std::span<const double> rho_grid, std::span<const double> addon_fit, double addon, bool* saturated);

EquivalenceCurve build_equivalence_curve(const EquivalenceInputs& in, std::span<const double> eps_grid,
                                         std::span<const double> rho_grid);

// Smallest grid eps with rho_equiv >= rho_target; NumericError when out of reach.
double select_eps_star(const EquivalenceCurve& curve, double rho_target);

EquivalenceResult build_equivalence_and_invert(const EquivalenceInputs& in, std::span<const double> eps_grid,
                                               std::span<const double> rho_grid, double rho_target);

} // namespace envcva
