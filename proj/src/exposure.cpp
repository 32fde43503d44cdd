#include "envcva/exposure.hpp"

#include <cmath>

#include "envcva/error.hpp"
#include "envcva/parallel.hpp"
#include "envcva/rng.hpp"
#include "envcva/time_grid.hpp"

namespace envcva {

void Hw1fParams::validate() const {
    if (!(a > 0.0) || !(sigma > 0.0)) throw ValidationError("HW1F requires a > 0 and sigma > 0");
}

Hw1fModel::Hw1fModel(Hw1fParams params, DiscountCurve curve, double forward_step)
    : params_(params), curve_(std::move(curve)), forward_step_(forward_step) {
    params_.validate();
    if (!(forward_step_ > 0.0)) throw ValidationError("forward-rate step must be positive");
}

double Hw1fModel::forward_rate(double t) const { return curve_.instantaneous_forward(t, forward_step_); }

double Hw1fModel::shift(double t) const {
    const double a = params_.a;
    const double s = params_.sigma;
    const double g = 1.0 - std::exp(-a * t);
    return forward_rate(t) + s * s / (2.0 * a * a) * g * g;
}

double Hw1fModel::integrated_shift(double t) const {
    const double a = params_.a;
    const double s = params_.sigma;
    const double variance = s * s / (a * a) * (t - 2.0 * (1.0 - std::exp(-a * t)) / a + (1.0 - std::exp(-2.0 * a * t)) / (2.0 * a));
    return -curve_.log_df(t) + 0.5 * variance;
}

double Hw1fModel::bond_b(double t, double maturity) const {
    return (1.0 - std::exp(-params_.a * (maturity - t))) / params_.a;
}

double Hw1fModel::log_bond_a(double t, double maturity) const {
    const double a = params_.a;
    const double s = params_.sigma;
    const double b = bond_b(t, maturity);
    return curve_.log_df(maturity) - curve_.log_df(t) + b * forward_rate(t) -
           s * s / (4.0 * a) * (1.0 - std::exp(-2.0 * a * t)) * b * b;
}

double Hw1fModel::zcb_price(double short_rate, double t, double maturity) const {
    if (maturity < t) throw ValidationError("bond maturity precedes valuation time");
    if (maturity == t) return 1.0;
    return std::exp(log_bond_a(t, maturity) - bond_b(t, maturity) * short_rate);
}

double zcb_price(const Hw1fModel& model, double short_rate, double t, double maturity) {
    return model.zcb_price(short_rate, t, maturity);
}

ShortRatePaths simulate_hw1f_paths(const Hw1fModel& model, const std::vector<double>& grid, std::size_t n_paths,
                                   std::uint64_t seed) {
    if (n_paths < 2) throw ValidationError("need at least 2 paths");
    const double dt = uniform_step(grid);
    const double a = model.params().a;
    const double s = model.params().sigma;

    // Joint Gaussian step of (x_{t+dt}, int_t^{t+dt} x) given x_t.
    const double decay = std::exp(-a * dt);
    const double b_dt = (1.0 - decay) / a;
    const double var_x = s * s / (2.0 * a) * (1.0 - decay * decay);
    const double var_y = s * s / (a * a) * (dt - 2.0 * b_dt + (1.0 - decay * decay) / (2.0 * a));
    const double cov_xy = s * s / (2.0 * a * a) * (1.0 - decay) * (1.0 - decay);
    const double l11 = std::sqrt(var_x);
    const double l21 = cov_xy / l11;
    const double l22 = std::sqrt(std::max(0.0, var_y - l21 * l21));

    const std::size_t n = grid.size();
    std::vector<double> shift(n), int_shift(n);
    for (std::size_t i = 0; i < n; ++i) {
        shift[i] = model.shift(grid[i]);
        int_shift[i] = model.integrated_shift(grid[i]);
    }

    ShortRatePaths out;
    out.grid = grid;
    out.n_paths = n_paths;
    out.seed = seed;
    out.rates.resize(n_paths * n);
    out.integrated.resize(n_paths * n);
    const CounterRng rng(seed);
    parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            double x = 0.0;
            double y = 0.0;
            double* r = out.rates.data() + p * n;
            double* integral = out.integrated.data() + p * n;
            r[0] = shift[0];
            integral[0] = 0.0;
            for (std::size_t i = 1; i < n; ++i) {
                const auto [z1, z2] = rng.normal2(p, i);
                const double x_next = x * decay + l11 * z1;
                y += x * b_dt + l21 * z1 + l22 * z2;
                x = x_next;
                r[i] = x + shift[i];
                integral[i] = y + int_shift[i];
            }
        }
    });
    return out;
}

SwapSpec SwapSpec::vanilla(double notional, double maturity, int frequency, double fixed_rate, bool payer_fixed) {
    if (frequency < 1 || !(maturity > 0.0)) throw ValidationError("swap needs positive maturity and frequency");
    const long periods = std::lround(maturity * frequency);
    if (std::abs(static_cast<double>(periods) - maturity * frequency) > 1e-9)
        throw ValidationError("swap maturity must be a whole number of periods");
    SwapSpec spec;
    spec.notional = notional;
    spec.fixed_rate = fixed_rate;
    spec.payer_fixed = payer_fixed;
    for (long k = 1; k <= periods; ++k) {
        spec.payment_times.push_back(static_cast<double>(k) / frequency);
        spec.accruals.push_back(1.0 / frequency);
    }
    return spec;
}

void SwapSpec::validate() const {
    if (payment_times.empty() || payment_times.size() != accruals.size())
        throw ValidationError("swap needs matching payment times and accruals");
    for (std::size_t k = 0; k < payment_times.size(); ++k) {
        if (!(accruals[k] > 0.0)) throw ValidationError("swap accruals must be positive");
        if (k > 0 && !(payment_times[k] > payment_times[k - 1])) throw ValidationError("payment times must increase");
    }
}

double par_rate(const SwapSpec& spec, const DiscountCurve& curve) {
    spec.validate();
    double annuity = 0.0;
    for (std::size_t k = 0; k < spec.payment_times.size(); ++k) annuity += spec.accruals[k] * curve.df(spec.payment_times[k]);
    return (1.0 - curve.df(spec.payment_times.back())) / annuity;
}

double swap_value(const Hw1fModel& model, const SwapSpec& spec, double short_rate, double t) {
    if (t >= spec.payment_times.back()) return 0.0;
    double fixed = 0.0;
    for (std::size_t k = 0; k < spec.payment_times.size(); ++k) {
        if (spec.payment_times[k] <= t) continue;
        fixed += spec.accruals[k] * model.zcb_price(short_rate, t, spec.payment_times[k]);
    }
    const double floating = 1.0 - model.zcb_price(short_rate, t, spec.payment_times.back());
    const double payer = spec.notional * (floating - spec.fixed_rate * fixed);
    return spec.payer_fixed ? payer : -payer;
}

ExposureCube compute_exposure_cube(const ShortRatePaths& paths, const SwapSpec& spec, const Hw1fModel& model) {
    spec.validate();
    const std::size_t n = paths.grid.size();
    ExposureCube cube;
    cube.grid = paths.grid;
    cube.n_paths = paths.n_paths;
    cube.seed = paths.seed;
    cube.discount.resize(n);
    for (std::size_t i = 0; i < n; ++i) cube.discount[i] = model.curve().df(paths.grid[i]);
    cube.positive_exposure.assign(paths.n_paths * n, 0.0);

    // Per grid time the affine coefficients of every remaining bond are deterministic.
    struct Bond {
        double log_a;
        double b;
        double weight;
    };
    std::vector<std::vector<Bond>> bonds(n);
    const double last = spec.payment_times.back();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = paths.grid[i];
        if (t >= last) continue;
        for (std::size_t k = 0; k < spec.payment_times.size(); ++k) {
            const double tk = spec.payment_times[k];
            if (tk <= t) continue;
            double w = -spec.fixed_rate * spec.accruals[k];
            if (k + 1 == spec.payment_times.size()) w -= 1.0;
            bonds[i].push_back({model.log_bond_a(t, tk), model.bond_b(t, tk), w});
        }
    }
    const double sign = spec.payer_fixed ? 1.0 : -1.0;
    parallel_for(paths.n_paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            for (std::size_t i = 0; i < n; ++i) {
                if (bonds[i].empty()) continue;
                const double r = paths.rate(p, i);
                double v = 1.0;
                for (const auto& bond : bonds[i]) v += bond.weight * std::exp(bond.log_a - bond.b * r);
                cube.positive_exposure[p * n + i] = std::max(sign * spec.notional * v, 0.0);
            }
        }
    }, 64);
    return cube;
}

std::vector<double> epe_profile(const ExposureCube& cube) {
    if (cube.n_paths == 0) throw ValidationError("empty exposure cube");
    const std::size_t n = cube.n_points();
    std::vector<double> epe(n, 0.0);
    for (std::size_t p = 0; p < cube.n_paths; ++p)
        for (std::size_t i = 0; i < n; ++i) epe[i] += cube.positive_exposure[p * n + i];
    for (double& v : epe) v /= static_cast<double>(cube.n_paths);
    return epe;
}

} // namespace envcva
