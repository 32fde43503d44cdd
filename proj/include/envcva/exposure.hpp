#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "envcva/market_data.hpp"

namespace envcva {

struct Hw1fParams {
    double a = 0.5;     // mean reversion, 1/years
    double sigma = 0.01; // absolute short-rate volatility

    void validate() const;
};

// Hull-White 1F fitted to an initial discount curve. The drift theta(t) is
// never tabulated; bond prices use the affine form with the curve and the
// shift phi(t) = f(0,t) + sigma^2/(2a^2) (1 - e^{-at})^2.
class Hw1fModel {
public:
    Hw1fModel(Hw1fParams params, DiscountCurve curve, double forward_step);

    const Hw1fParams& params() const { return params_; }
    const DiscountCurve& curve() const { return curve_; }

    double forward_rate(double t) const;
    double shift(double t) const;
    // Integral of the shift over [0,t], exact for the fitted curve.
    double integrated_shift(double t) const;
    double bond_b(double t, double maturity) const;
    double log_bond_a(double t, double maturity) const;
    double zcb_price(double short_rate, double t, double maturity) const;

private:
    Hw1fParams params_;
    DiscountCurve curve_;
    double forward_step_;
};

// Row-major paths x grid matrix of short rates, plus the integrated rate
// (log bank account) used for discount reconstruction checks.
struct ShortRatePaths {
    std::vector<double> grid;
    std::size_t n_paths = 0;
    std::vector<double> rates;
    std::vector<double> integrated;
    std::uint64_t seed = 0;

    std::size_t n_points() const { return grid.size(); }
    double rate(std::size_t path, std::size_t i) const { return rates[path * grid.size() + i]; }
    double integral(std::size_t path, std::size_t i) const { return integrated[path * grid.size() + i]; }
};

// Exact Ornstein-Uhlenbeck transition of the centred factor x = r - phi, with
// its time integral sampled jointly. Requires a uniform grid.
ShortRatePaths simulate_hw1f_paths(const Hw1fModel& model, const std::vector<double>& grid, std::size_t n_paths,
                                   std::uint64_t seed);

double zcb_price(const Hw1fModel& model, double short_rate, double t, double maturity);

struct SwapSpec {
    double notional = 1.0;
    double fixed_rate = 0.0;
    std::vector<double> payment_times;
    std::vector<double> accruals;
    bool payer_fixed = true;

    static SwapSpec vanilla(double notional, double maturity, int frequency, double fixed_rate, bool payer_fixed = true);
    void validate() const;
};

// Fixed rate making the swap worth zero at t = 0 on the curve.
double par_rate(const SwapSpec& spec, const DiscountCurve& curve);

// Payer value N(1 - P(t,T_m)) - N K sum_{T_k > t} alpha_k P(t,T_k); negated for receivers.
double swap_value(const Hw1fModel& model, const SwapSpec& spec, double short_rate, double t);

struct ExposureCube {
    std::vector<double> grid;
    std::size_t n_paths = 0;
    std::vector<double> positive_exposure; // row-major n_paths x grid
    std::vector<double> discount;          // DF(0, t_i)
    std::uint64_t seed = 0;

    std::size_t n_points() const { return grid.size(); }
    double at(std::size_t path, std::size_t i) const { return positive_exposure[path * grid.size() + i]; }
    std::span<const double> row(std::size_t path) const {
        return {positive_exposure.data() + path * grid.size(), grid.size()};
    }
};

ExposureCube compute_exposure_cube(const ShortRatePaths& paths, const SwapSpec& spec, const Hw1fModel& model);

std::vector<double> epe_profile(const ExposureCube& cube);

} // namespace envcva
