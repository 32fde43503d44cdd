#include "envcva/robust_wwr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "envcva/error.hpp"

namespace envcva {

double KlBudget::pinsker_tv_bound() const { return std::sqrt(epsilon / 2.0); }

double dual_objective(double eta, std::span<const double> losses, double epsilon) {
    if (!(eta > 0.0)) throw ValidationError("dual parameter eta must be positive");
    if (losses.empty()) throw ValidationError("empty loss sample");
    const double top = *std::max_element(losses.begin(), losses.end());
    double sum = 0.0;
    for (const double l : losses) sum += std::exp((l - top) / eta);
    return eta * epsilon + top + eta * std::log(sum / static_cast<double>(losses.size()));
}

double kl_from_uniform(std::span<const double> weights) {
    const double n = static_cast<double>(weights.size());
    double kl = 0.0;
    for (const double q : weights)
        if (q > 0.0) kl += q * std::log(n * q);
    return std::max(kl, 0.0);
}

std::vector<double> tilted_weights(std::span<const double> losses, double eta) {
    std::vector<double> w(losses.size());
    if (!std::isfinite(eta)) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
        return w;
    }
    const double top = *std::max_element(losses.begin(), losses.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < losses.size(); ++j) sum += (w[j] = std::exp((losses[j] - top) / eta));
    for (double& v : w) v /= sum;
    return w;
}

namespace {

double weighted_mean(std::span<const double> losses, std::span<const double> weights) {
    double acc = 0.0;
    for (std::size_t j = 0; j < losses.size(); ++j) acc += weights[j] * losses[j];
    return acc;
}

RobustBound solve_upper(std::span<const double> losses, double epsilon) {
    const auto [lo_it, hi_it] = std::minmax_element(losses.begin(), losses.end());
    const double top = *hi_it;
    const double n = static_cast<double>(losses.size());
    RobustBound out;
    out.epsilon = epsilon;
    out.sample_mean = std::accumulate(losses.begin(), losses.end(), 0.0) / n;
    const double range = top - *lo_it;
    if (epsilon == 0.0 || range == 0.0) {
        // Zero budget or a constant sample: the infimum sits at a limit of eta.
        out.bound = range == 0.0 ? top : out.sample_mean;
        out.eta_star = range == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        out.weights.assign(losses.size(), 1.0 / n);
        out.achieved_kl = 0.0;
        return out;
    }
    // Budget large enough to put all mass on the maximal atoms: eta* -> 0.
    const auto k_max = static_cast<double>(std::count(losses.begin(), losses.end(), top));
    if (epsilon >= std::log(n / k_max)) {
        out.bound = top;
        out.eta_star = 0.0;
        out.weights.assign(losses.size(), 0.0);
        for (std::size_t j = 0; j < losses.size(); ++j)
            if (losses[j] == top) out.weights[j] = 1.0 / k_max;
        out.achieved_kl = kl_from_uniform(out.weights);
        return out;
    }

    auto g = [&](double log_eta) { return dual_objective(std::exp(log_eta), losses, epsilon); };
    // g'(eta) = epsilon - KL(q_eta); KL decreases in eta.
    auto excess_kl = [&](double log_eta) { return kl_from_uniform(tilted_weights(losses, std::exp(log_eta))) - epsilon; };

    // Doubling scan of eta over [1e-6, 1e6] x scale, then golden section on ln eta.
    const double scale = std::max(range, 1.0);
    const double log_first = std::log(1e-6 * scale);
    const double log_last = std::log(1e6 * scale);
    const double log2 = std::log(2.0);
    std::vector<double> nodes;
    for (double s = log_first; s < log_last; s += log2) nodes.push_back(s);
    nodes.push_back(log_last);
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double v = g(nodes[k]);
        if (v < best_value) {
            best_value = v;
            best = k;
        }
    }
    double scan_lo = nodes[best == 0 ? 0 : best - 1];
    const double scan_hi = nodes[std::min(best + 1, nodes.size() - 1)];
    double a = scan_lo;
    double b = scan_hi;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double gc = g(c), gd = g(d);
    while (b - a > 1e-10) {
        if (gc <= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }

    // g is flat at its minimum, so function values pin eta only to ~sqrt(machine
    // epsilon). Polish on the first-order condition, keeping the feasible side.
    double lo = std::max(scan_lo, a - 1e-4);
    double hi = std::min(scan_hi, b + 1e-4);
    if (!(excess_kl(lo) >= 0.0 && excess_kl(hi) <= 0.0)) {
        lo = scan_lo;
        hi = scan_hi;
        for (int k = 0; k < 200 && excess_kl(lo) < 0.0; ++k) lo -= log2;
    }
    double log_eta = 0.5 * (a + b);
    if (excess_kl(lo) >= 0.0 && excess_kl(hi) <= 0.0) {
        for (int k = 0; k < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++k) {
            const double mid = 0.5 * (lo + hi);
            (excess_kl(mid) > 0.0 ? lo : hi) = mid;
        }
        log_eta = hi;
    }
    double eta = std::exp(log_eta);
    out.weights = tilted_weights(losses, eta);
    out.achieved_kl = kl_from_uniform(out.weights);
    for (int k = 0; k < 200 && out.achieved_kl > epsilon + 1e-12; ++k) {
        eta *= 1.0 + 1e-9 * (1 << std::min(k, 20));
        out.weights = tilted_weights(losses, eta);
        out.achieved_kl = kl_from_uniform(out.weights);
    }
    out.eta_star = eta;
    out.bound = weighted_mean(losses, out.weights);
    const double dual = dual_objective(eta, losses, epsilon);
    if (std::abs(dual - out.bound) > 1e-6 * std::max(1.0, std::abs(out.bound)))
        throw NumericError("KL dual and tilted primal disagree beyond 1e-6");
    return out;
}

} // namespace

RobustBound solve_kl_bound(std::span<const double> losses, double epsilon, BoundDirection direction) {
    if (losses.empty()) throw ValidationError("empty loss sample");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("KL budget must be finite and >= 0");
    if (direction == BoundDirection::upper) return solve_upper(losses, epsilon);
    // inf E_Q[L] = -sup E_Q[-L].
    std::vector<double> negated(losses.size());
    std::transform(losses.begin(), losses.end(), negated.begin(), [](double l) { return -l; });
    RobustBound out = solve_upper(negated, epsilon);
    out.bound = -out.bound;
    out.sample_mean = -out.sample_mean;
    out.direction = BoundDirection::lower;
    return out;
}

RobustBound solve_kl_bound(const LossSampleSet& losses, double epsilon, BoundDirection direction) {
    return solve_kl_bound(std::span<const double>(losses.losses), epsilon, direction);
}

WwrDecomposition delta_wwr(const RobustBound& bound_s, const RobustBound& bound_ref, const CvaResult& ind_s,
                           const CvaResult& ind_ref) {
    if (bound_s.epsilon != bound_ref.epsilon) throw ValidationError("Delta WWR needs a common KL budget");
    if (ind_s.notional != ind_ref.notional) throw ValidationError("Delta WWR needs a common notional");
    const double to_bp = 1e4 / ind_s.notional;
    WwrDecomposition out;
    out.ecva_ind_bp = ecva_relative(ind_s, ind_ref);
    out.ecva_upper_bp = (bound_s.bound - bound_ref.bound) * to_bp;
    out.delta_wwr_bp = out.ecva_upper_bp - out.ecva_ind_bp;
    out.addon_s_bp = bound_s.bound * to_bp - ind_s.cva_bp;
    out.addon_ref_bp = bound_ref.bound * to_bp - ind_ref.cva_bp;
    return out;
}

EpsSweep eps_sweep(const LossSampleSet& losses_s, const LossSampleSet& losses_ref, std::span<const double> epsilons) {
    EpsSweep sweep;
    // Only the scenario leg is robustified; the reference stays at its sample mean.
    const double ref = losses_ref.mean();
    const double ind = losses_s.mean() - ref;
    double previous_eps = -1.0;
    for (const double eps : epsilons) {
        if (!(eps >= 0.0) || !(eps > previous_eps)) throw ValidationError("epsilon grid must be nonnegative and increasing");
        previous_eps = eps;
        const auto upper_s = solve_kl_bound(losses_s, eps);
        SweepRow row{eps, ind, upper_s.bound - ref, 0.0};
        row.wwr = row.cva_upper - row.cva_ind;
        if (!sweep.rows.empty() && row.wwr < sweep.rows.back().wwr) sweep.wwr_nondecreasing = false;
        sweep.rows.push_back(row);
    }
    return sweep;
}

MarginalDistortion marginal_distortion(const LossSampleSet& losses, std::span<const double> weights,
                                       const ExposureCube& cube) {
    const std::size_t draws = losses.n_draws();
    if (losses.path_index.size() != draws || losses.interval.size() != draws)
        throw ValidationError("loss sample lacks draw metadata");
    if (weights.size() != draws) throw ValidationError("weights do not match the loss sample");
    const std::size_t n = cube.n_points();
    MarginalDistortion out;
    out.times.assign(cube.grid.begin() + 1, cube.grid.end());
    out.pmf_p.assign(n - 1, 0.0);
    out.pmf_q.assign(n - 1, 0.0);
    out.epe_p.assign(n - 1, 0.0);
    out.epe_q.assign(n - 1, 0.0);
    const double p = 1.0 / static_cast<double>(draws);
    for (std::size_t j = 0; j < draws; ++j) {
        const std::uint32_t interval = losses.interval[j];
        if (interval == 0) {
            out.survivor_p += p;
            out.survivor_q += weights[j];
        } else {
            out.pmf_p[interval - 1] += p;
            out.pmf_q[interval - 1] += weights[j];
        }
        const auto exposure = cube.row(losses.path_index[j]);
        for (std::size_t i = 1; i < n; ++i) {
            out.epe_p[i - 1] += p * exposure[i];
            out.epe_q[i - 1] += weights[j] * exposure[i];
        }
    }
    return out;
}

} // namespace envcva
