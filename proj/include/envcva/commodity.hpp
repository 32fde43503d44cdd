#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "envcva/exposure.hpp"
#include "envcva/market_data.hpp"

namespace envcva {

struct CommodityCurveState {
    std::vector<double> tenors;   // years, increasing
    std::vector<double> forwards; // > 0
    std::string label = "M0";

    void validate() const;
    // Linear in tenor, flat beyond the end nodes.
    double forward(double tenor) const;
};

// `tenor_years,forward` file.
CommodityCurveState load_forward_curve(const std::filesystem::path& path);

CommodityCurveState shift_forward_curve(const CommodityCurveState& curve, double factor);

enum class FuturesModel { one_factor, two_factor };

// 1F: dF/F = sigma_short e^{-kappa (T-t)} dW1.
// 2F: adds sigma_long dW2 with corr(dW1, dW2) = correlation.
struct CommodityParams {
    FuturesModel model = FuturesModel::one_factor;
    double sigma_short = 0.35;
    double kappa = 1.0;
    double sigma_long = 0.0;
    double correlation = 0.0;

    void validate() const;
    // Defaults for the two-factor layer: long vol 0.15 x short vol, zero correlation.
    static CommodityParams two_factor_default(double sigma_short, double kappa);
};

// Factor states per path and grid point. Futures are rebuilt in closed form:
// ln F(t,T) = ln F(0,T) + e^{-kappa(T-t)} X_t + Y_t - 0.5 Var(...).
struct FuturesPaths {
    std::vector<double> grid;
    std::size_t n_paths = 0;
    CommodityParams params;
    CommodityCurveState initial;
    std::vector<double> short_factor; // X, row-major
    std::vector<double> long_factor;  // Y, row-major (zeros for 1F)
    std::uint64_t seed = 0;

    double futures(std::size_t path, std::size_t i, double maturity) const;
    double log_variance(double t, double maturity) const;
};

FuturesPaths simulate_wti_futures(const CommodityParams& params, const CommodityCurveState& initial,
                                  const std::vector<double>& grid, std::size_t n_paths, std::uint64_t seed);

struct CommoditySwapSpec {
    double fixed_price = 0.0;
    std::vector<double> payment_times;
    double volume = 1.0; // per settlement period
    bool payer_fixed = true;

    static CommoditySwapSpec monthly(double maturity, double fixed_price, double volume = 1.0);
};

// Average initial forward over the settlement tenors.
double average_forward(const CommodityCurveState& curve, const std::vector<double>& payment_times);

// Payer-fixed value sum_{T_k > t} (F(t,T_k) - K) volume DF(t,T_k) with DF(t,T) = P(0,T)/P(0,t).
ExposureCube commodity_swap_exposure(const FuturesPaths& paths, const CommoditySwapSpec& swap, const DiscountCurve& discount);

} // namespace envcva
