#include "envcva/commodity.hpp"

#include <algorithm>
#include <cmath>

#include "envcva/csv.hpp"
#include "envcva/error.hpp"
#include "envcva/parallel.hpp"
#include "envcva/rng.hpp"
#include "envcva/time_grid.hpp"

namespace envcva {

void CommodityCurveState::validate() const {
    if (tenors.empty() || tenors.size() != forwards.size()) throw ValidationError("forward curve needs matching nodes");
    for (std::size_t i = 0; i < tenors.size(); ++i) {
        if (!(forwards[i] > 0.0)) throw ValidationError("forward prices must be positive");
        if (i > 0 && !(tenors[i] > tenors[i - 1])) throw ValidationError("forward tenors must increase");
    }
}

double CommodityCurveState::forward(double tenor) const {
    if (tenor <= tenors.front()) return forwards.front();
    if (tenor >= tenors.back()) return forwards.back();
    const auto it = std::upper_bound(tenors.begin(), tenors.end(), tenor);
    const std::size_t hi = static_cast<std::size_t>(it - tenors.begin());
    const std::size_t lo = hi - 1;
    const double w = (tenor - tenors[lo]) / (tenors[hi] - tenors[lo]);
    return (1.0 - w) * forwards[lo] + w * forwards[hi];
}

CommodityCurveState load_forward_curve(const std::filesystem::path& path) {
    const auto table = csv::read(path, {"tenor_years", "forward"});
    CommodityCurveState curve;
    for (const auto& row : table.rows) {
        curve.tenors.push_back(csv::parse_double(row.fields[0], path, row.line));
        curve.forwards.push_back(csv::parse_double(row.fields[1], path, row.line));
    }
    curve.validate();
    return curve;
}

CommodityCurveState shift_forward_curve(const CommodityCurveState& curve, double factor) {
    if (!(factor > 0.0)) throw ValidationError("forward curve shift factor must be positive");
    CommodityCurveState out = curve;
    for (double& f : out.forwards) f *= factor;
    out.label = "M1";
    return out;
}

void CommodityParams::validate() const {
    if (!(sigma_short >= 0.0) || !(kappa >= 0.0) || !(sigma_long >= 0.0))
        throw ValidationError("commodity volatilities and kappa must be nonnegative");
    if (!(correlation > -1.0 && correlation < 1.0)) throw ValidationError("factor correlation must lie in (-1,1)");
}

CommodityParams CommodityParams::two_factor_default(double sigma_short, double kappa) {
    return {FuturesModel::two_factor, sigma_short, kappa, 0.15 * sigma_short, 0.0};
}

namespace {

// int_0^t e^{-c(t-s)} ds, continuous at c = 0.
double decay_integral(double c, double t) {
    if (c * t < 1e-10) return t;
    return (1.0 - std::exp(-c * t)) / c;
}

} // namespace

double FuturesPaths::log_variance(double t, double maturity) const {
    const double tau = maturity - t;
    const double damp = std::exp(-params.kappa * tau);
    const double s1 = params.sigma_short;
    double v = damp * damp * s1 * s1 * decay_integral(2.0 * params.kappa, t);
    if (params.model == FuturesModel::two_factor) {
        const double s2 = params.sigma_long;
        v += s2 * s2 * t + 2.0 * damp * params.correlation * s1 * s2 * decay_integral(params.kappa, t);
    }
    return v;
}

double FuturesPaths::futures(std::size_t path, std::size_t i, double maturity) const {
    const double t = grid[i];
    const std::size_t idx = path * grid.size() + i;
    const double damp = std::exp(-params.kappa * (maturity - t));
    const double log_move = damp * short_factor[idx] + long_factor[idx] - 0.5 * log_variance(t, maturity);
    return initial.forward(maturity) * std::exp(log_move);
}

FuturesPaths simulate_wti_futures(const CommodityParams& params, const CommodityCurveState& initial,
                                  const std::vector<double>& grid, std::size_t n_paths, std::uint64_t seed) {
    params.validate();
    initial.validate();
    if (n_paths < 2) throw ValidationError("need at least 2 paths");
    const double dt = uniform_step(grid);
    const double k = params.kappa;
    const double s1 = params.sigma_short;
    const double s2 = params.model == FuturesModel::two_factor ? params.sigma_long : 0.0;
    const double rho = params.model == FuturesModel::two_factor ? params.correlation : 0.0;

    // Exact step: X' = e^{-k dt} X + e1, Y' = Y + e2 with
    // Var e1 = s1^2 (1-e^{-2k dt})/(2k), Var e2 = s2^2 dt, Cov = rho s1 s2 (1-e^{-k dt})/k.
    const double decay = std::exp(-k * dt);
    const double var1 = s1 * s1 * decay_integral(2.0 * k, dt);
    const double var2 = s2 * s2 * dt;
    const double cov = rho * s1 * s2 * decay_integral(k, dt);
    const double l11 = std::sqrt(var1);
    const double l21 = l11 > 0.0 ? cov / l11 : 0.0;
    const double l22 = std::sqrt(std::max(0.0, var2 - l21 * l21));

    const std::size_t n = grid.size();
    FuturesPaths out;
    out.grid = grid;
    out.n_paths = n_paths;
    out.params = params;
    if (params.model == FuturesModel::one_factor) out.params.sigma_long = 0.0;
    out.initial = initial;
    out.seed = seed;
    out.short_factor.assign(n_paths * n, 0.0);
    out.long_factor.assign(n_paths * n, 0.0);
    const CounterRng rng(seed);
    parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            double x = 0.0, y = 0.0;
            for (std::size_t i = 1; i < n; ++i) {
                const auto [z1, z2] = rng.normal2(p, i);
                x = decay * x + l11 * z1;
                y += l21 * z1 + l22 * z2;
                out.short_factor[p * n + i] = x;
                out.long_factor[p * n + i] = y;
            }
        }
    });
    return out;
}

CommoditySwapSpec CommoditySwapSpec::monthly(double maturity, double fixed_price, double volume) {
    const long months = std::lround(maturity * 12.0);
    if (months < 1 || std::abs(static_cast<double>(months) - maturity * 12.0) > 1e-9)
        throw ValidationError("commodity swap maturity must be a whole number of months");
    CommoditySwapSpec spec;
    spec.fixed_price = fixed_price;
    spec.volume = volume;
    for (long m = 1; m <= months; ++m) spec.payment_times.push_back(static_cast<double>(m) / 12.0);
    return spec;
}

double average_forward(const CommodityCurveState& curve, const std::vector<double>& payment_times) {
    if (payment_times.empty()) throw ValidationError("no settlement tenors");
    double sum = 0.0;
    for (const double t : payment_times) sum += curve.forward(t);
    return sum / static_cast<double>(payment_times.size());
}

ExposureCube commodity_swap_exposure(const FuturesPaths& paths, const CommoditySwapSpec& swap, const DiscountCurve& discount) {
    if (swap.payment_times.empty()) throw ValidationError("commodity swap has no settlements");
    if (swap.payment_times.back() > paths.initial.tenors.back() + 1e-9)
        throw ValidationError("swap settlements extend beyond the simulated forward curve");
    const std::size_t n = paths.grid.size();
    ExposureCube cube;
    cube.grid = paths.grid;
    cube.n_paths = paths.n_paths;
    cube.seed = paths.seed;
    cube.discount.resize(n);
    for (std::size_t i = 0; i < n; ++i) cube.discount[i] = discount.df(paths.grid[i]);
    cube.positive_exposure.assign(paths.n_paths * n, 0.0);

    struct Leg {
        double log_forward_scale; // ln F(0,T) - 0.5 Var
        double damp;
        double df;                // DF(t,T)
        double tenor;
    };
    std::vector<std::vector<Leg>> legs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = paths.grid[i];
        for (const double tk : swap.payment_times) {
            if (tk <= t) continue;
            legs[i].push_back({std::log(paths.initial.forward(tk)) - 0.5 * paths.log_variance(t, tk),
                               std::exp(-paths.params.kappa * (tk - t)), discount.df(tk) / discount.df(t), tk});
        }
    }
    const double sign = swap.payer_fixed ? 1.0 : -1.0;
    parallel_for(paths.n_paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            for (std::size_t i = 0; i < n; ++i) {
                const double x = paths.short_factor[p * n + i];
                const double y = paths.long_factor[p * n + i];
                double v = 0.0;
                for (const auto& leg : legs[i]) {
                    const double f = std::exp(leg.log_forward_scale + leg.damp * x + y);
                    v += (f - swap.fixed_price) * leg.df;
                }
                cube.positive_exposure[p * n + i] = std::max(sign * swap.volume * v, 0.0);
            }
        }
    }, 64);
    return cube;
}

} // namespace envcva
