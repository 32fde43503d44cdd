#include "envcva/scenario_translation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "envcva/error.hpp"
#include "envcva/stats.hpp"

namespace envcva {

std::string to_string(TailMode mode) { return mode == TailMode::one_sided ? "one-sided" : "two-sided"; }

TailMode parse_tail_mode(const std::string& text) {
    if (text == "one-sided") return TailMode::one_sided;
    if (text == "two-sided") return TailMode::two_sided;
    throw ValidationError("unknown tail mode `" + text + "`");
}

ClimateTranslation climate_multiplier(const DriverSet& scenario, const DriverSet& reference,
                                      const std::map<std::string, double>& betas, const std::vector<double>& grid,
                                      const std::string& scenario_id) {
    std::vector<double> log_m(grid.size(), 0.0);
    for (const auto& [driver, beta] : betas) {
        const auto s = scenario.find(driver);
        const auto r = reference.find(driver);
        if (s == scenario.end() || r == reference.end()) throw DataError("missing driver `" + driver + "`");
        if (s->second.values.size() != grid.size() || r->second.values.size() != grid.size())
            throw ValidationError("driver `" + driver + "` is not on the engine grid");
        if (!(s->second.base_value > 0.0) || !(r->second.base_value > 0.0))
            throw ValidationError("driver `" + driver + "` base value must be positive");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double xs = s->second.values[i];
            const double xr = r->second.values[i];
            if (!(xs > 0.0) || !(xr > 0.0)) throw ValidationError("driver `" + driver + "` must be positive");
            log_m[i] += beta * (std::log(xs / s->second.base_value) - std::log(xr / r->second.base_value));
        }
    }
    ClimateTranslation out;
    out.path = {grid, std::vector<double>(grid.size()), scenario_id, {0.0, kClimateSafetyCap}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double m = std::exp(log_m[i]);
        if (m > kClimateSafetyCap) out.safety_cap_hit = true;
        out.path.values[i] = std::min(m, kClimateSafetyCap);
    }
    return out;
}

std::vector<double> policy_stress(std::span<const double> indicator) {
    if (indicator.empty()) throw ValidationError("empty indicator path");
    for (const double x : indicator)
        if (!(x > 0.0)) throw ValidationError("indicator values must be positive");
    std::vector<double> out(indicator.size());
    for (std::size_t i = 0; i < indicator.size(); ++i) out[i] = indicator[0] / indicator[i];
    return out;
}

std::vector<double> to_good_state(std::span<const double> indicator) {
    std::vector<double> out(indicator.size());
    for (std::size_t i = 0; i < indicator.size(); ++i) {
        if (!(indicator[i] > 0.0)) throw ValidationError("indicator values must be positive");
        out[i] = 1.0 / indicator[i];
    }
    return out;
}

namespace {

std::vector<double> annual_offsets(std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i);
    return g;
}

void check_clip(ClipBounds clip) {
    if (!(clip.lo > 0.0) || !(clip.lo < clip.hi)) throw ValidationError("clip bounds need 0 < lo < hi");
}

} // namespace

MultiplierPath nature_policy_multiplier(std::span<const double> indicator_s, std::span<const double> indicator_ref,
                                        double beta, ClipBounds clip, const std::string& scenario_id) {
    if (indicator_s.size() != indicator_ref.size()) throw ValidationError("indicator paths differ in length");
    check_clip(clip);
    const auto stress_s = policy_stress(indicator_s);
    const auto stress_ref = policy_stress(indicator_ref);
    const std::vector<double> ones(stress_s.size(), 1.0);
    return hybrid_multiplier(stress_s, stress_ref, ones, beta, clip, scenario_id);
}

void TwoStageParams::validate() const {
    if (!(omega >= 0.0 && omega <= 1.0)) throw ValidationError("omega must lie in [0,1]");
    if (!(cost_share > 0.0 && cost_share < 1.0)) throw ValidationError("cost share must lie in (0,1)");
    check_clip(hazard_clip);
    if (!(recovery_clip.lo >= 0.0 && recovery_clip.hi <= 1.0 && recovery_clip.lo < recovery_clip.hi))
        throw ValidationError("recovery bounds must lie within [0,1]");
}

TwoStageResult two_stage_transmission(std::span<const double> physical_ratio, std::span<const double> price_proxy,
                                      const TwoStageParams& params, const std::vector<double>& grid,
                                      const std::string& scenario_id) {
    params.validate();
    if (physical_ratio.size() != grid.size()) throw ValidationError("physical ratio is not on the given grid");
    if (!price_proxy.empty() && price_proxy.size() != grid.size())
        throw ValidationError("price proxy is not on the given grid");
    TwoStageResult out;
    out.multiplier = {grid, std::vector<double>(grid.size()), scenario_id, params.hazard_clip};
    out.recovery = {grid, std::vector<double>(grid.size())};
    out.badness.resize(grid.size());
    const double c = params.cost_share;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double cr = physical_ratio[i];
        if (!(cr > 0.0)) throw ValidationError("physical ratio must be positive");
        const double pi = price_proxy.empty() ? 1.0 : price_proxy[i];
        if (!(pi > 0.0)) throw ValidationError("price proxy must be positive");
        const double cr_eff = 1.0 + params.omega * (cr - 1.0);
        const double mu = std::pow(std::max(cr_eff, 0.0), params.alpha_catch) * std::pow(pi, params.alpha_price);
        const double e = (mu - c) / (1.0 - c);
        if (!(e > 0.0)) {
            out.badness[i] = std::numeric_limits<double>::infinity();
            out.multiplier.values[i] = params.hazard_clip.hi;
            out.recovery.recovery[i] = params.recovery_clip.lo;
            ++out.wiped_out_points;
            continue;
        }
        const double u = -std::log(e);
        out.badness[i] = u;
        out.multiplier.values[i] = params.hazard_clip.apply(std::exp(params.beta_pd * u));
        out.recovery.recovery[i] = params.recovery_clip.apply(params.base_recovery - params.k_recovery * std::max(u, 0.0));
    }
    return out;
}

TailFactorEnsemble tail_factors(const std::vector<ProviderPathPanel>& panels, TailMode mode) {
    if (panels.size() < 2) throw ValidationError("tail factors need at least 2 providers");
    TailFactorEnsemble out;
    out.mode = mode;
    out.years = panels.front().years;
    for (const auto& p : panels) {
        if (p.years != out.years) throw ValidationError("provider `" + p.provider_label + "` is on a different year grid");
        out.providers.push_back(p.provider_label);
        out.factors.emplace_back(out.years.size());
    }
    std::vector<double> column(panels.size());
    for (std::size_t y = 0; y < out.years.size(); ++y) {
        for (std::size_t i = 0; i < panels.size(); ++i) column[i] = panels[i].stress_values[y];
        const double med = stats::median(column);
        for (std::size_t i = 0; i < panels.size(); ++i) {
            const double f = column[i] / med;
            out.factors[i][y] = mode == TailMode::one_sided ? std::max(1.0, f) : f;
        }
    }
    return out;
}

MultiplierPath hybrid_multiplier(std::span<const double> stress_s, std::span<const double> stress_ref,
                                 std::span<const double> factor, double beta, ClipBounds clip,
                                 const std::string& scenario_id) {
    if (stress_s.size() != stress_ref.size() || stress_s.size() != factor.size())
        throw ValidationError("hybrid multiplier inputs are not aligned");
    check_clip(clip);
    MultiplierPath out{annual_offsets(stress_s.size()), std::vector<double>(stress_s.size()), scenario_id, clip};
    for (std::size_t i = 0; i < stress_s.size(); ++i) {
        const double ratio = stress_s[i] * factor[i] / stress_ref[i];
        if (!(ratio > 0.0)) throw ValidationError("stress ratios must be positive");
        out.values[i] = clip.apply(ratio == 1.0 ? 1.0 : std::pow(ratio, beta));
    }
    return out;
}

std::vector<double> annual_to_grid(std::span<const double> annual, const std::vector<double>& grid) {
    if (annual.empty()) throw ValidationError("empty annual path");
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto year = static_cast<std::size_t>(std::max(0.0, std::floor(grid[i] + 1e-9)));
        out[i] = annual[std::min(year, annual.size() - 1)];
    }
    return out;
}

MultiplierPath annual_to_grid(const MultiplierPath& annual, const std::vector<double>& grid) {
    return {grid, annual_to_grid(annual.values, grid), annual.scenario_id, annual.clip};
}

RecoveryPath annual_to_grid(const RecoveryPath& annual, const std::vector<double>& grid) {
    return {grid, annual_to_grid(annual.recovery, grid)};
}

MultiplierPath unit_multiplier(const std::vector<double>& grid, const std::string& scenario_id) {
    return {grid, std::vector<double>(grid.size(), 1.0), scenario_id, {0.0, kClimateSafetyCap}};
}

} // namespace envcva
