#include "envcva/credit_curves.hpp"

#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "envcva/error.hpp"
#include "envcva/time_grid.hpp"

namespace envcva {

RecoveryPath constant_recovery(const std::vector<double>& grid, double recovery) {
    if (!(recovery >= 0.0 && recovery <= 1.0)) throw ValidationError("recovery must lie in [0,1]");
    return {grid, std::vector<double>(grid.size(), recovery)};
}

std::vector<double> IntervalMasses::cumulative() const {
    std::vector<double> f(dp.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dp.size(); ++i) f[i] = (acc += dp[i]);
    return f;
}

namespace {

struct Legs {
    double premium_annuity;  // premium leg per unit spread
    double protection;
};

Legs cds_legs(double intensity, const CdsQuote& q, const DiscountCurve& discount) {
    const int periods = static_cast<int>(std::lround(q.maturity * q.premium_frequency));
    const double accrual = 1.0 / q.premium_frequency;
    Legs legs{0.0, 0.0};
    double s_prev = 1.0;
    for (int k = 1; k <= periods; ++k) {
        const double t = k * accrual;
        const double s = std::exp(-intensity * t);
        const double default_mass = s_prev - s;
        const double df_mid = discount.df(t - 0.5 * accrual);
        legs.premium_annuity += accrual * discount.df(t) * s + 0.5 * accrual * df_mid * default_mass;
        legs.protection += (1.0 - q.recovery) * df_mid * default_mass;
        s_prev = s;
    }
    return legs;
}

void validate(const CdsQuote& q) {
    if (!(q.recovery >= 0.0 && q.recovery < 1.0)) throw ValidationError("CDS recovery must lie in [0,1)");
    if (!(q.maturity > 0.0) || q.premium_frequency < 1) throw ValidationError("CDS maturity and frequency must be positive");
    const double periods = q.maturity * q.premium_frequency;
    if (std::abs(periods - std::round(periods)) > 1e-9) throw ValidationError("CDS maturity must be a whole number of periods");
}

} // namespace

double cds_par_spread(double intensity, const CdsQuote& quote, const DiscountCurve& discount) {
    validate(quote);
    const Legs legs = cds_legs(intensity, quote, discount);
    return legs.protection / legs.premium_annuity;
}

double calibrate_flat_hazard(const CdsQuote& quote, const DiscountCurve& discount) {
    validate(quote);
    if (!(quote.par_spread >= 0.0)) throw ValidationError("CDS spread must be nonnegative");
    if (quote.par_spread == 0.0) return 0.0;
    auto gap = [&](double lambda) {
        const Legs legs = cds_legs(lambda, quote, discount);
        return quote.par_spread * legs.premium_annuity - legs.protection;
    };
    constexpr double lo = 1e-8;
    constexpr double hi = 10.0;
    const double f_lo = gap(lo);
    const double f_hi = gap(hi);
    if (f_lo * f_hi > 0.0) throw NumericError("CDS calibration: no sign change of the leg gap on [1e-8, 10]");
    boost::uintmax_t iterations = 200;
    const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
    const auto [a, b] = boost::math::tools::toms748_solve(gap, lo, hi, f_lo, f_hi, tol, iterations);
    const double root = 0.5 * (a + b);
    if (std::abs(gap(root)) > 1e-12) throw NumericError("CDS calibration did not reach the leg-gap tolerance");
    return root;
}

HazardCurve flat_hazard(const std::vector<double>& grid, double intensity, std::string scenario_id) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw ValidationError("intensity must be finite and >= 0");
    return {grid, std::vector<double>(grid.size(), intensity), std::move(scenario_id)};
}

SurvivalCurve survival_curve(const HazardCurve& hazard) {
    if (hazard.grid.size() != hazard.intensities.size() || hazard.grid.empty())
        throw ValidationError("hazard curve grid and intensities differ in length");
    SurvivalCurve out{hazard.grid, std::vector<double>(hazard.grid.size())};
    double cumulative = 0.0;
    out.survival[0] = 1.0;
    for (std::size_t i = 1; i < hazard.grid.size(); ++i) {
        const double lambda = hazard.intensities[i - 1];
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("intensities must be finite and >= 0");
        cumulative += lambda * (hazard.grid[i] - hazard.grid[i - 1]);
        out.survival[i] = std::exp(-cumulative);
    }
    return out;
}

HazardCurve apply_multiplier(const HazardCurve& base, const MultiplierPath& m) {
    require_same_grid(base.grid, m.grid, "hazard curve vs multiplier path");
    HazardCurve out{base.grid, base.intensities, m.scenario_id};
    for (std::size_t i = 0; i < out.intensities.size(); ++i) out.intensities[i] *= m.values[i];
    return out;
}

IntervalMasses interval_default_probs(const SurvivalCurve& survival) {
    if (survival.survival.empty()) throw ValidationError("empty survival curve");
    IntervalMasses out;
    out.dp.resize(survival.survival.size() - 1);
    for (std::size_t i = 1; i < survival.survival.size(); ++i)
        out.dp[i - 1] = survival.survival[i - 1] - survival.survival[i];
    out.survivor = survival.survival.back();
    return out;
}

} // namespace envcva
