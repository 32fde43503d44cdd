#include "envcva/dependence_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "envcva/error.hpp"
#include "envcva/parallel.hpp"
#include "envcva/rng.hpp"
#include "envcva/robust_wwr.hpp"
#include "envcva/stats.hpp"
#include "envcva/time_grid.hpp"

namespace envcva {

namespace {

// Counts strict inversions of v while sorting it.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t swaps = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += mid - i;
            scratch[k++] = v[j++];
        } else {
            scratch[k++] = v[i++];
        }
    }
    while (i < mid) scratch[k++] = v[i++];
    while (j < hi) scratch[k++] = v[j++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

std::uint64_t tie_pairs(std::span<const double> sorted) {
    std::uint64_t pairs = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            pairs += run * (run - 1) / 2;
            run = 1;
        }
    }
    return pairs;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

} // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("kendall_tau: samples differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw ValidationError("kendall_tau: need at least two observations");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    std::uint64_t x_ties = 0, joint_ties = 0;
    std::size_t run_x = 1, run_xy = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        const bool same_x = i < n && x[order[i]] == x[order[i - 1]];
        const bool same_xy = same_x && y[order[i]] == y[order[i - 1]];
        if (same_x) {
            ++run_x;
        } else {
            x_ties += run_x * (run_x - 1) / 2;
            run_x = 1;
        }
        if (same_xy) {
            ++run_xy;
        } else {
            joint_ties += run_xy * (run_xy - 1) / 2;
            run_xy = 1;
        }
    }
    std::vector<double> ys(n), scratch(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    const std::uint64_t discordant = count_inversions(ys, scratch, 0, n);
    const std::uint64_t y_ties = tie_pairs(ys);
    const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (x_ties == pairs || y_ties == pairs) throw NumericError("kendall_tau: constant sample");
    const double numerator = static_cast<double>(pairs) - static_cast<double>(x_ties) - static_cast<double>(y_ties) +
                             static_cast<double>(joint_ties) - 2.0 * static_cast<double>(discordant);
    const double denominator = std::sqrt(static_cast<double>(pairs - x_ties) * static_cast<double>(pairs - y_ties));
    return std::clamp(numerator / denominator, -1.0, 1.0);
}

double latent_rho(double tau) {
    if (!(tau >= -1.0 && tau <= 1.0)) throw ValidationError("latent_rho: tau outside [-1, 1]");
    return std::sin(std::numbers::pi * tau / 2.0);
}

DailySeries log_returns(const DailySeries& levels) {
    DailySeries out;
    out.label = levels.label;
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!(levels.values[i] > 0.0) || !(levels.values[i - 1] > 0.0))
            throw DataError("log returns need positive levels in " + levels.label + " at " +
                            format_iso_date(levels.dates[i]));
        out.dates.push_back(levels.dates[i]);
        out.values.push_back(std::log(levels.values[i] / levels.values[i - 1]));
    }
    return out;
}

DailySeries differences(const DailySeries& levels) {
    DailySeries out;
    out.label = levels.label;
    for (std::size_t i = 1; i < levels.size(); ++i) {
        out.dates.push_back(levels.dates[i]);
        out.values.push_back(levels.values[i] - levels.values[i - 1]);
    }
    return out;
}

AlignedPair inner_join(const DailySeries& a, const DailySeries& b) {
    AlignedPair out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a.dates[i] < b.dates[j]) {
            ++i;
        } else if (b.dates[j] < a.dates[i]) {
            ++j;
        } else {
            out.dates.push_back(a.dates[i]);
            out.x.push_back(a.values[i++]);
            out.y.push_back(b.values[j++]);
        }
    }
    return out;
}

std::string to_string(DependenceSide side) { return side == DependenceSide::long_side ? "long" : "short"; }

DependenceSide parse_dependence_side(const std::string& text) {
    if (text == "long") return DependenceSide::long_side;
    if (text == "short") return DependenceSide::short_side;
    throw ValidationError("side must be 'long' or 'short', got '" + text + "'");
}

RollingRho rolling_directional_rho(const AlignedPair& data, std::size_t window, std::size_t vol_window) {
    if (window < 2) throw ValidationError("rolling window must be at least 2");
    if (vol_window < 2 || vol_window > window) throw ValidationError("vol window must lie in [2, window]");
    const std::size_t n = data.x.size();
    if (n < window)
        throw DataError("insufficient overlap: " + std::to_string(n) + " aligned days for a window of " +
                        std::to_string(window));
    const std::size_t count = n - window + 1;
    std::vector<double> rho(count), vol(count);
    std::vector<char> valid(count, 0);
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const std::span<const double> xs(data.x.data() + k, window);
            const std::span<const double> ys(data.y.data() + k, window);
            const auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
            const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
            if (*xlo == *xhi || *ylo == *yhi) continue;
            rho[k] = latent_rho(kendall_tau(xs, ys));
            const auto tail = xs.last(vol_window);
            const double m = stats::mean(tail);
            double ss = 0.0;
            for (const double v : tail) ss += (v - m) * (v - m);
            vol[k] = std::sqrt(ss / static_cast<double>(vol_window - 1));
            valid[k] = 1;
        }
    }, 16);
    RollingRho out;
    out.window = window;
    out.vol_window = vol_window;
    for (std::size_t k = 0; k < count; ++k) {
        if (!valid[k]) {
            ++out.skipped_windows;
            continue;
        }
        out.end_dates.push_back(data.dates[k + window - 1]);
        out.rho.push_back(rho[k]);
        out.rho_long.push_back(std::max(rho[k], 0.0));
        out.rho_short.push_back(std::max(-rho[k], 0.0));
        out.realized_vol.push_back(vol[k]);
    }
    return out;
}

DependenceTarget stressed_target(const RollingRho& rolling, double vol_quantile, double tail_quantile,
                                 DependenceSide side) {
    if (!(vol_quantile >= 0.0 && vol_quantile <= 1.0) || !(tail_quantile >= 0.0 && tail_quantile <= 1.0))
        throw ValidationError("quantiles must lie in [0, 1]");
    DependenceTarget target;
    target.window = rolling.window;
    target.vol_window = rolling.vol_window;
    target.vol_quantile = vol_quantile;
    target.tail_quantile = tail_quantile;
    target.side = side;
    target.windows_total = rolling.rho.size();
    if (rolling.rho.empty())
        throw DataError("empty stress regime: 0 valid windows (" + std::to_string(rolling.skipped_windows) +
                        " skipped for zero variance)");
    target.vol_threshold = stats::empirical_quantile(rolling.realized_vol, vol_quantile);
    const auto& series = side == DependenceSide::short_side ? rolling.rho_short : rolling.rho_long;
    std::vector<double> kept;
    for (std::size_t k = 0; k < series.size(); ++k)
        if (rolling.realized_vol[k] >= target.vol_threshold) kept.push_back(series[k]);
    target.windows_stressed = kept.size();
    if (kept.empty())
        throw DataError("empty stress regime: no window with realized vol >= " + std::to_string(target.vol_threshold));
    target.rho_target = std::clamp(stats::empirical_quantile(kept, tail_quantile), 0.0, 1.0);
    std::ostringstream regime;
    regime << "realized vol (" << rolling.vol_window << "d) >= q" << vol_quantile << " = " << target.vol_threshold
           << "; " << to_string(side) << " rho q" << tail_quantile;
    target.regime = regime.str();
    return target;
}

CopulaCva copula_diagnostic_cva(const ExposureCube& cube, const IntervalMasses& masses, const RecoveryPath& recovery,
                                double rho, std::size_t n_draws, std::uint64_t seed) {
    if (!(rho > -1.0 && rho < 1.0)) throw ValidationError("copula correlation must lie in (-1, 1)");
    if (n_draws < 1) throw ValidationError("need at least one copula draw");
    const std::size_t n = cube.n_points();
    if (masses.dp.size() + 1 != n) throw ValidationError("interval masses do not match the exposure grid");
    require_same_grid(cube.grid, recovery.grid, "exposure vs recovery path");
    const std::size_t paths = cube.n_paths;

    std::vector<double> score(paths, 0.0);
    for (std::size_t p = 0; p < paths; ++p)
        for (std::size_t i = 1; i < n; ++i) score[p] += cube.discount[i] * cube.at(p, i) * masses.dp[i - 1];
    std::vector<std::size_t> ranked(paths);
    std::iota(ranked.begin(), ranked.end(), 0);
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });

    const auto cumulative = masses.cumulative();
    const double total_default = cumulative.back();
    const double tail = std::sqrt(1.0 - rho * rho);
    CopulaCva out;
    out.rho = rho;
    out.losses.assign(n_draws, 0.0);
    std::vector<std::uint32_t> interval(n_draws, 0);
    const CounterRng rng(seed);
    parallel_for(n_draws, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const auto [g1, g2] = rng.normal2(0, j);
            const double u_market = normal_cdf(g1);
            const double u_default = normal_cdf(-rho * g1 - tail * g2);
            const auto rank = std::min(static_cast<std::size_t>(u_market * static_cast<double>(paths)), paths - 1);
            if (u_default > total_default) continue;
            const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u_default);
            const std::size_t i = static_cast<std::size_t>(it - cumulative.begin()) + 1;
            interval[j] = static_cast<std::uint32_t>(i);
            out.losses[j] = (1.0 - recovery.recovery[i]) * cube.discount[i] * cube.at(ranked[rank], i);
        }
    });
    out.interval_counts.assign(n, 0);
    for (const auto i : interval) ++out.interval_counts[i];
    out.cva = stats::mean(out.losses);
    out.standard_error = stats::standard_error(out.losses);
    return out;
}

double invert_addon(std::span<const double> rho_grid, std::span<const double> addon_fit, double addon, bool* saturated) {
    if (saturated) *saturated = false;
    if (addon <= addon_fit.front()) return rho_grid.front();
    for (std::size_t k = 1; k < addon_fit.size(); ++k) {
        if (addon_fit[k] >= addon) {
            const double w = (addon - addon_fit[k - 1]) / (addon_fit[k] - addon_fit[k - 1]);
            return rho_grid[k - 1] + w * (rho_grid[k] - rho_grid[k - 1]);
        }
    }
    if (saturated) *saturated = true;
    return rho_grid.back();
}

namespace {

std::vector<double> with_leading_zero(std::span<const double> grid, const char* name) {
    std::vector<double> out;
    if (grid.empty() || grid.front() != 0.0) out.push_back(0.0);
    double previous = -1.0;
    for (const double v : grid) {
        if (!(v >= 0.0) || !(v > previous)) throw ValidationError(std::string(name) + " must be nonnegative and increasing");
        previous = v;
        out.push_back(v);
    }
    return out;
}

} // namespace

EquivalenceCurve build_equivalence_curve(const EquivalenceInputs& in, std::span<const double> eps_grid,
                                         std::span<const double> rho_grid) {
    if (!in.cube_s || !in.cube_ref || !in.losses_s || !in.losses_ref) throw ValidationError("equivalence inputs incomplete");
    if (in.copula_draws < 1) throw ValidationError("need at least one copula draw");
    EquivalenceCurve curve;
    curve.rho_grid = with_leading_zero(rho_grid, "rho grid");
    if (curve.rho_grid.back() >= 1.0) throw ValidationError("rho grid must stay below 1");
    curve.eps_grid = with_leading_zero(eps_grid, "eps grid");
    const double to_bp = 1e4 / in.notional;

    const auto masses_s = interval_default_probs(in.survival_s);
    const auto masses_ref = interval_default_probs(in.survival_ref);
    const std::size_t n_rho = curve.rho_grid.size();
    std::vector<double> ecva_rho(n_rho);
    // Same seed for every rho and both scenarios. The sampler parallelizes internally.
    for (std::size_t k = 0; k < n_rho; ++k) {
        const double rho = curve.rho_grid[k];
        const auto s = copula_diagnostic_cva(*in.cube_s, masses_s, in.recovery_s, rho, in.copula_draws, in.seed);
        const auto r = copula_diagnostic_cva(*in.cube_ref, masses_ref, in.recovery_ref, rho, in.copula_draws, in.seed);
        ecva_rho[k] = (s.cva - r.cva) * to_bp;
    }
    curve.addon_rho.resize(n_rho);
    for (std::size_t k = 0; k < n_rho; ++k) curve.addon_rho[k] = ecva_rho[k] - ecva_rho[0];
    curve.addon_rho_fit = stats::isotonic_increasing(curve.addon_rho);
    for (double& a : curve.addon_rho_fit) a = std::max(a, 0.0);
    curve.addon_rho_fit[0] = 0.0;

    const std::size_t n_eps = curve.eps_grid.size();
    curve.addon_eps.assign(n_eps, 0.0);
    const double ind = in.losses_s->mean() - in.losses_ref->mean();
    parallel_for(n_eps, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            if (curve.eps_grid[k] == 0.0) continue;
            const auto us = solve_kl_bound(*in.losses_s, curve.eps_grid[k]);
            const auto ur = solve_kl_bound(*in.losses_ref, curve.eps_grid[k]);
            curve.addon_eps[k] = (us.bound - ur.bound - ind) * to_bp;
        }
    }, 1);

    std::vector<double> raw(n_eps);
    curve.saturated.assign(n_eps, false);
    for (std::size_t k = 0; k < n_eps; ++k) {
        bool sat = false;
        raw[k] = invert_addon(curve.rho_grid, curve.addon_rho_fit, curve.addon_eps[k], &sat);
        curve.saturated[k] = sat;
    }
    curve.rho_equiv = stats::isotonic_increasing(raw);
    return curve;
}

double select_eps_star(const EquivalenceCurve& curve, double rho_target) {
    if (!(rho_target >= 0.0 && rho_target <= 1.0)) throw ValidationError("rho target must lie in [0, 1]");
    for (std::size_t k = 0; k < curve.eps_grid.size(); ++k)
        if (curve.rho_equiv[k] >= rho_target) return curve.eps_grid[k];
    std::ostringstream msg;
    msg << "budget unattainable: rho target " << rho_target << " exceeds max attainable rho_equiv "
        << curve.rho_equiv.back() << " at eps " << curve.eps_grid.back();
    throw NumericError(msg.str());
}

EquivalenceResult build_equivalence_and_invert(const EquivalenceInputs& in, std::span<const double> eps_grid,
                                               std::span<const double> rho_grid, double rho_target) {
    EquivalenceResult out;
    out.curve = build_equivalence_curve(in, eps_grid, rho_grid);
    out.rho_target = rho_target;
    out.max_attainable_rho = out.curve.rho_equiv.back();
    out.eps_star = select_eps_star(out.curve, rho_target);
    return out;
}

} // namespace envcva
