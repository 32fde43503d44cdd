#pragma once

#include <string>
#include <vector>

#include "envcva/market_data.hpp"

namespace envcva {

struct ClipBounds {
    double lo;
    double hi;

    double apply(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

// Scenario hazard multiplier m_s(t) sampled on a grid (engine grid or annual offsets).
struct MultiplierPath {
    std::vector<double> grid;
    std::vector<double> values;
    std::string scenario_id;
    ClipBounds clip{0.0, 1e6};
};

struct RecoveryPath {
    std::vector<double> grid;
    std::vector<double> recovery;
};

RecoveryPath constant_recovery(const std::vector<double>& grid, double recovery);

// Piecewise-constant intensity: intensities[i] applies on [grid[i], grid[i+1]).
struct HazardCurve {
    std::vector<double> grid;
    std::vector<double> intensities;
    std::string scenario_id;
};

struct SurvivalCurve {
    std::vector<double> grid;
    std::vector<double> survival;
};

// Interval masses dp[i-1] = S(t_{i-1}) - S(t_i) for i = 1..n plus the survivor mass S(t_n).
struct IntervalMasses {
    std::vector<double> dp;
    double survivor = 1.0;

    // Cumulative default masses F_i, i = 1..n.
    std::vector<double> cumulative() const;
};

struct CdsQuote {
    double par_spread;  // decimal per annum
    double recovery;
    double maturity;    // years
    int premium_frequency = 4;
};

// Par spread of a CDS under a flat intensity: premium accrual per period,
// default paid at period midpoint, accrued premium on default included.
double cds_par_spread(double intensity, const CdsQuote& quote, const DiscountCurve& discount);

// Flat intensity solving premium leg = protection leg.
double calibrate_flat_hazard(const CdsQuote& quote, const DiscountCurve& discount);

HazardCurve flat_hazard(const std::vector<double>& grid, double intensity, std::string scenario_id = "ref");
SurvivalCurve survival_curve(const HazardCurve& hazard);
HazardCurve apply_multiplier(const HazardCurve& base, const MultiplierPath& m);
IntervalMasses interval_default_probs(const SurvivalCurve& survival);

} // namespace envcva
