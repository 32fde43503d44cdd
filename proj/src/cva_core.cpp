#include "envcva/cva_core.hpp"

#include <algorithm>
#include <cmath>

#include "envcva/error.hpp"
#include "envcva/parallel.hpp"
#include "envcva/rng.hpp"
#include "envcva/stats.hpp"
#include "envcva/time_grid.hpp"

namespace envcva {

CvaResult make_cva_result(double cva, double standard_error, double notional, std::string scenario_id) {
    if (!(notional > 0.0)) throw ValidationError("notional must be positive");
    return {cva, 1e4 * cva / notional, standard_error, notional, std::move(scenario_id)};
}

ExposureProfile ExposureProfile::from_cube(const ExposureCube& cube) {
    ExposureProfile profile;
    profile.grid = cube.grid;
    profile.discount = cube.discount;
    profile.n_paths = cube.n_paths;
    profile.epe = epe_profile(cube);
    const std::size_t n = cube.n_points();
    profile.covariance.assign(n * n, 0.0);
    std::vector<double> centred(n);
    for (std::size_t p = 0; p < cube.n_paths; ++p) {
        for (std::size_t i = 0; i < n; ++i) centred[i] = cube.at(p, i) - profile.epe[i];
        for (std::size_t i = 0; i < n; ++i) {
            if (centred[i] == 0.0) continue;
            double* row = profile.covariance.data() + i * n;
            for (std::size_t j = i; j < n; ++j) row[j] += centred[i] * centred[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = profile.covariance[i * n + j] / static_cast<double>(cube.n_paths);
            profile.covariance[i * n + j] = v;
            profile.covariance[j * n + i] = v;
        }
    return profile;
}

namespace {

// Per-grid weights w_i = (1-R_i) DF_i dp_i so that CVA = w . EPE.
std::vector<double> loss_weights(const std::vector<double>& grid, const std::vector<double>& discount,
                                 const SurvivalCurve& survival, const RecoveryPath& recovery) {
    require_same_grid(grid, survival.grid, "exposure vs survival curve");
    require_same_grid(grid, recovery.grid, "exposure vs recovery path");
    std::vector<double> w(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dp = survival.survival[i - 1] - survival.survival[i];
        w[i] = (1.0 - recovery.recovery[i]) * discount[i] * dp;
    }
    return w;
}

} // namespace

CvaResult independence_cva(const ExposureProfile& profile, const SurvivalCurve& survival, const RecoveryPath& recovery,
                           double notional, const std::string& scenario_id) {
    const auto w = loss_weights(profile.grid, profile.discount, survival, recovery);
    const std::size_t n = w.size();
    double cva = 0.0;
    for (std::size_t i = 1; i < n; ++i) cva += w[i] * profile.epe[i];
    double variance = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] == 0.0) continue;
        const double* row = profile.covariance.data() + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * w[j];
        variance += w[i] * acc;
    }
    const double se = profile.n_paths > 1 ? std::sqrt(std::max(variance, 0.0) / static_cast<double>(profile.n_paths - 1)) : 0.0;
    return make_cva_result(cva, se, notional, scenario_id);
}

CvaResult independence_cva(const ExposureCube& cube, const SurvivalCurve& survival, const RecoveryPath& recovery,
                           double notional, const std::string& scenario_id) {
    const auto w = loss_weights(cube.grid, cube.discount, survival, recovery);
    std::vector<double> per_path(cube.n_paths);
    for (std::size_t p = 0; p < cube.n_paths; ++p) {
        double c = 0.0;
        for (std::size_t i = 1; i < w.size(); ++i) c += w[i] * cube.at(p, i);
        per_path[p] = c;
    }
    // Accumulate in the same order as the profile route (sum over grid of w_i EPE_i).
    const auto epe = epe_profile(cube);
    double cva = 0.0;
    for (std::size_t i = 1; i < w.size(); ++i) cva += w[i] * epe[i];
    return make_cva_result(cva, stats::standard_error(per_path), notional, scenario_id);
}

CvaResult independence_cva(const ExposureCube& cube, const SurvivalCurve& survival, double recovery, double notional,
                           const std::string& scenario_id) {
    return independence_cva(cube, survival, constant_recovery(cube.grid, recovery), notional, scenario_id);
}

double LossSampleSet::mean() const { return stats::mean(losses); }

double LossSampleSet::standard_error() const { return stats::standard_error(losses); }

LossSampleSet sample_losses(const ExposureCube& cube, const SurvivalCurve& survival, const RecoveryPath& recovery,
                            std::size_t n_draws, std::uint64_t seed, double notional, const std::string& scenario_id) {
    if (n_draws < 1) throw ValidationError("need at least one loss draw");
    require_same_grid(cube.grid, survival.grid, "exposure vs survival curve");
    require_same_grid(cube.grid, recovery.grid, "exposure vs recovery path");
    const auto masses = interval_default_probs(survival);
    const auto cumulative = masses.cumulative();
    const double total_default = cumulative.empty() ? 0.0 : cumulative.back();

    LossSampleSet out;
    out.losses.assign(n_draws, 0.0);
    out.path_index.assign(n_draws, 0);
    out.interval.assign(n_draws, 0);
    out.scenario_id = scenario_id;
    out.seed = seed;
    out.notional = notional;
    const CounterRng rng(seed);
    const std::size_t paths = cube.n_paths;
    parallel_for(n_draws, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const auto [u_path, u_default] = rng.uniform2(0, j);
            const auto p = std::min(static_cast<std::size_t>(u_path * static_cast<double>(paths)), paths - 1);
            out.path_index[j] = static_cast<std::uint32_t>(p);
            if (u_default > total_default) continue;
            const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u_default);
            const std::size_t i = static_cast<std::size_t>(it - cumulative.begin()) + 1;
            out.interval[j] = static_cast<std::uint32_t>(i);
            out.losses[j] = (1.0 - recovery.recovery[i]) * cube.discount[i] * cube.at(p, i);
        }
    });
    return out;
}

LossSampleSet sample_losses(const ExposureCube& cube, const SurvivalCurve& survival, double recovery,
                            std::size_t n_draws, std::uint64_t seed, double notional, const std::string& scenario_id) {
    return sample_losses(cube, survival, constant_recovery(cube.grid, recovery), n_draws, seed, notional, scenario_id);
}

CvaResult cva_from_samples(const LossSampleSet& losses) {
    return make_cva_result(losses.mean(), losses.standard_error(), losses.notional, losses.scenario_id);
}

double ecva_relative(const CvaResult& scenario, const CvaResult& reference) {
    if (scenario.notional != reference.notional) throw ValidationError("ECVA needs a common notional");
    return scenario.cva_bp - reference.cva_bp;
}

DistributionSummary distribution_summary(std::span<const double> values, double policy_only) {
    if (values.empty()) throw ValidationError("distribution summary of an empty ensemble");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto tail_mean = [&](double var) {
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), var);
        double sum = 0.0;
        for (auto it = first; it != sorted.end(); ++it) sum += *it;
        return sum / static_cast<double>(sorted.end() - first);
    };
    DistributionSummary s;
    s.n = sorted.size();
    s.policy_only = policy_only;
    s.median = stats::median(sorted);
    s.mean = stats::mean(sorted);
    s.var95 = stats::empirical_quantile_sorted(sorted, 0.95);
    s.es95 = tail_mean(s.var95);
    s.var99 = stats::empirical_quantile_sorted(sorted, 0.99);
    s.es99 = tail_mean(s.var99);
    const auto negatives = std::lower_bound(sorted.begin(), sorted.end(), 0.0) - sorted.begin();
    s.prob_negative = static_cast<double>(negatives) / static_cast<double>(sorted.size());
    return s;
}

CornerDecomposition corner_decomposition(double cva_00, double cva_10, double cva_01, double cva_11) {
    CornerDecomposition d;
    d.cva_00 = cva_00;
    d.cva_10 = cva_10;
    d.cva_01 = cva_01;
    d.cva_11 = cva_11;
    d.credit = cva_10 - cva_00;
    d.market = cva_01 - cva_00;
    d.interaction = cva_11 - cva_10 - cva_01 + cva_00;
    // The identity credit + market + interaction = total holds exactly when total is their sum.
    d.total = d.credit + d.market + d.interaction;
    d.interaction_share = d.total != 0.0 ? std::abs(d.interaction) / std::abs(d.total) : 0.0;
    return d;
}

} // namespace envcva
