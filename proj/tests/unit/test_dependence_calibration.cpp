#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"

#include "envcva/dependence_calibration.hpp"
#include "envcva/error.hpp"
#include "envcva/rng.hpp"
#include "envcva/stats.hpp"

using namespace envcva;

namespace {

// O(n^2) pair count, tau-b.
double naive_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
    double concordant = 0, discordant = 0, tx = 0, ty = 0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0 && dy == 0) continue;
            if (dx == 0) {
                ++tx;
            } else if (dy == 0) {
                ++ty;
            } else if (dx * dy > 0) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    return (concordant - discordant) / std::sqrt((concordant + discordant + tx) * (concordant + discordant + ty));
}

AlignedPair aligned(const std::vector<double>& x, const std::vector<double>& y) {
    AlignedPair p;
    for (std::size_t i = 0; i < x.size(); ++i) p.dates.push_back(Date{std::chrono::days{static_cast<int>(i)}});
    p.x = x;
    p.y = y;
    return p;
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
    const CounterRng rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = rng.normal2(stream, i).first;
    return out;
}

RollingRho constant_rolling(std::vector<double> rho, std::vector<double> vol) {
    RollingRho r;
    r.window = 60;
    r.vol_window = 20;
    r.rho = rho;
    for (const double v : rho) {
        r.rho_long.push_back(std::max(v, 0.0));
        r.rho_short.push_back(std::max(-v, 0.0));
        r.end_dates.push_back(Date{});
    }
    r.realized_vol = std::move(vol);
    return r;
}

} // namespace

TEST_SUITE("dependence_calibration") {

TEST_CASE("kendall tau point values") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> neg(x.size());
    std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
    CHECK(kendall_tau(x, x) == 1.0);
    CHECK(kendall_tau(x, neg) == -1.0);
    const std::vector<double> a{1, 2, 3}, b{1, 3, 2};
    CHECK(kendall_tau(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(kendall_tau(a, x), ValidationError);
    const std::vector<double> flat{2, 2, 2};
    CHECK_THROWS_AS(kendall_tau(a, flat), NumericError);
}

TEST_CASE("kendall tau matches the quadratic pair count, with and without ties") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const std::size_t n = 5 + seed * 7;
        auto x = gaussian(n, seed, 0);
        auto y = gaussian(n, seed, 1);
        for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * x[i];
        if (seed % 2 == 0)
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = std::round(x[i] * 2.0);
                y[i] = std::round(y[i]);
            }
        CHECK(kendall_tau(x, y) == doctest::Approx(naive_tau_b(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("latent correlation map") {
    CHECK(latent_rho(0.0) == 0.0);
    CHECK(latent_rho(1.0) == 1.0);
    CHECK(latent_rho(1.0 / 3.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double t = -1.0; t < 1.0; t += 0.125) {
        CHECK(latent_rho(-t) == -latent_rho(t));
        CHECK(latent_rho(t + 0.125) > latent_rho(t));
    }
    CHECK_THROWS_AS(latent_rho(1.5), ValidationError);
}

TEST_CASE("returns, differences and the inner join") {
    DailySeries a{"a", {Date{std::chrono::days{0}}, Date{std::chrono::days{1}}, Date{std::chrono::days{3}}}, {1.0, 2.0, 4.0}};
    DailySeries b{"b", {Date{std::chrono::days{1}}, Date{std::chrono::days{2}}, Date{std::chrono::days{3}}}, {5.0, 6.0, 7.0}};
    const auto r = log_returns(a);
    CHECK(r.values[0] == doctest::Approx(std::log(2.0)));
    CHECK(differences(b).values == std::vector<double>{1.0, 1.0});
    const auto j = inner_join(a, b);
    REQUIRE(j.dates.size() == 2);
    CHECK(j.x == std::vector<double>{2.0, 4.0});
    CHECK(j.y == std::vector<double>{5.0, 7.0});
}

TEST_CASE("rolling directional correlation") {
    const auto x = gaussian(300, 3);
    std::vector<double> neg(x.size());
    std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
    const auto same = rolling_directional_rho(aligned(x, x), 60, 20);
    REQUIRE(same.rho.size() == 241);
    for (std::size_t k = 0; k < same.rho.size(); ++k) {
        CHECK(same.rho_long[k] == 1.0);
        CHECK(same.rho_short[k] == 0.0);
    }
    const auto opposite = rolling_directional_rho(aligned(x, neg), 60, 20);
    for (const double v : opposite.rho_short) CHECK(v == 1.0);
    CHECK_THROWS_AS(rolling_directional_rho(aligned(x, x), 400, 20), DataError);
}

TEST_CASE("independent series give near-zero correlation") {
    const auto x = gaussian(6000, 4, 0);
    const auto y = gaussian(6000, 4, 1);
    const auto r = rolling_directional_rho(aligned(x, y), 60, 20);
    // Non-overlapping windows are independent.
    std::vector<double> blocks;
    for (std::size_t k = 0; k < r.rho.size(); k += 60) blocks.push_back(r.rho[k]);
    CHECK(std::abs(stats::mean(blocks)) < 3.0 * stats::standard_error(blocks));
}

TEST_CASE("constant windows are skipped and counted") {
    std::vector<double> x = gaussian(100, 5);
    std::vector<double> y(100, 1.0);
    for (std::size_t i = 70; i < 100; ++i) y[i] = x[i];
    const auto r = rolling_directional_rho(aligned(x, y), 20, 10);
    CHECK(r.skipped_windows == 51); // windows ending before index 70
    CHECK(r.rho.size() == 81 - 51);
}

TEST_CASE("stressed target") {
    const auto all = constant_rolling(std::vector<double>(50, -0.3), gaussian(50, 6));
    for (const double vq : {0.0, 0.5, 0.9})
        for (const double tq : {0.5, 0.95, 1.0})
            CHECK(stressed_target(all, vq, tq, DependenceSide::short_side).rho_target == doctest::Approx(0.3));

    // Two regimes: the high-vol decile carries stronger negative dependence.
    std::vector<double> rho, vol;
    for (int k = 0; k < 100; ++k) {
        const bool stressed = k % 10 == 0;
        rho.push_back(stressed ? -0.6 - 0.001 * k : -0.1 - 0.001 * k);
        vol.push_back(stressed ? 2.0 + 0.01 * k : 1.0 + 0.001 * k);
    }
    const auto two = constant_rolling(rho, vol);
    const auto stressed = stressed_target(two, 0.9, 0.95, DependenceSide::short_side);
    const auto unconditional = stressed_target(two, 0.0, 0.95, DependenceSide::short_side);
    CHECK(stressed.rho_target > unconditional.rho_target);
    CHECK(stressed.windows_stressed == 11); // ten stressed windows plus the threshold window itself
    const auto top = stressed_target(two, 0.9, 1.0, DependenceSide::short_side);
    CHECK(top.rho_target == doctest::Approx(0.69));
    CHECK(stressed_target(two, 0.9, 1.0, DependenceSide::long_side).rho_target == 0.0);
    CHECK_THROWS_AS(stressed_target(RollingRho{}, 0.9, 0.95, DependenceSide::short_side), DataError);
    CHECK(parse_dependence_side("long") == DependenceSide::long_side);
}

TEST_CASE("copula diagnostic") {
    const std::vector<double> grid{0.0, 1.0, 2.0, 3.0, 4.0};
    const std::size_t paths = 400;
    const auto z = gaussian(paths * grid.size(), 9);
    std::vector<double> e(paths * grid.size());
    for (std::size_t p = 0; p < paths; ++p)
        for (std::size_t i = 0; i < grid.size(); ++i) e[p * grid.size() + i] = std::max(0.0, z[p * grid.size() + 1] + 0.2 * z[p * grid.size() + i]);
    const auto cube = testing::make_cube(grid, paths, e);
    const auto surv = survival_curve(flat_hazard(grid, 0.1));
    const auto masses = interval_default_probs(surv);
    const auto rec = constant_recovery(grid, 0.4);
    const std::size_t draws = 100000;

    const auto c0 = copula_diagnostic_cva(cube, masses, rec, 0.0, draws, 21);
    const auto ind = independence_cva(cube, surv, rec, 1.0, "s");
    CHECK(std::abs(c0.cva - ind.cva) < 3.0 * c0.standard_error);

    double previous = c0.cva;
    std::vector<double> previous_losses = c0.losses;
    for (const double rho : {0.2, 0.4, 0.6, 0.8}) {
        const auto c = copula_diagnostic_cva(cube, masses, rec, rho, draws, 21);
        std::vector<double> diff(draws);
        for (std::size_t j = 0; j < draws; ++j) diff[j] = c.losses[j] - previous_losses[j];
        CHECK(c.cva - previous > -3.0 * stats::standard_error(diff));
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double p = masses.dp[i - 1];
            CHECK(std::abs(static_cast<double>(c.interval_counts[i]) / draws - p) < 3.0 * std::sqrt(p * (1 - p) / draws));
        }
        previous = c.cva;
        previous_losses = c.losses;
    }
    CHECK(previous > c0.cva);

    const auto flat_cube = testing::make_cube(grid, paths, std::vector<double>(paths * grid.size(), 1.0));
    const auto flat = copula_diagnostic_cva(flat_cube, masses, rec, 0.999, draws, 21);
    const auto flat_ind = independence_cva(flat_cube, surv, rec, 1.0, "s");
    CHECK(std::abs(flat.cva - flat_ind.cva) < 3.0 * flat.standard_error);
    CHECK_THROWS_AS(copula_diagnostic_cva(cube, masses, rec, 1.0, 10, 1), ValidationError);
}

TEST_CASE("add-on inversion and eps selection") {
    const std::vector<double> rho{0.0, 0.2, 0.4};
    const std::vector<double> fit{0.0, 1.0, 3.0};
    bool sat = false;
    CHECK(invert_addon(rho, fit, 0.5, &sat) == doctest::Approx(0.1));
    CHECK(invert_addon(rho, fit, 2.0, &sat) == doctest::Approx(0.3));
    CHECK_FALSE(sat);
    CHECK(invert_addon(rho, fit, 5.0, &sat) == 0.4);
    CHECK(sat);
    CHECK(invert_addon(rho, fit, -1.0, &sat) == 0.0);

    EquivalenceCurve curve;
    curve.eps_grid = {0.0, 0.01, 0.02};
    curve.rho_equiv = {0.0, 0.15, 0.35};
    CHECK(select_eps_star(curve, 0.0) == 0.0);
    CHECK(select_eps_star(curve, 0.15) == 0.01);
    CHECK(select_eps_star(curve, 0.2) == 0.02);
    CHECK_THROWS_WITH_AS(select_eps_star(curve, 0.5), doctest::Contains("budget unattainable"), NumericError);
}

TEST_CASE("equivalence curve recovers the generating correlation") {
    // Inverting the fitted rho map at one of its own nodes returns that node.
    const std::vector<double> grid{0.0, 1.0, 2.0, 3.0};
    const std::size_t paths = 300;
    const auto z = gaussian(paths * grid.size(), 10);
    std::vector<double> e(paths * grid.size());
    for (std::size_t p = 0; p < paths; ++p)
        for (std::size_t i = 0; i < grid.size(); ++i) e[p * grid.size() + i] = std::max(0.0, 1.0 + z[p * grid.size() + 1]);
    const auto cube = testing::make_cube(grid, paths, e);
    const auto ref_surv = survival_curve(flat_hazard(grid, 0.02));
    const auto s_surv = survival_curve(flat_hazard(grid, 0.06));
    const auto rec = constant_recovery(grid, 0.4);
    const auto ls = sample_losses(cube, s_surv, rec, 40000, 3, 1.0, "s");
    const auto lr = sample_losses(cube, ref_surv, rec, 40000, 3, 1.0, "ref");
    EquivalenceInputs in;
    in.cube_s = &cube;
    in.cube_ref = &cube;
    in.survival_s = s_surv;
    in.survival_ref = ref_surv;
    in.recovery_s = rec;
    in.recovery_ref = rec;
    in.losses_s = &ls;
    in.losses_ref = &lr;
    in.copula_draws = 40000;
    in.seed = 5;
    const std::vector<double> eps{0.005, 0.01, 0.02, 0.05};
    const std::vector<double> rhos{0.1, 0.2, 0.3, 0.5, 0.7, 0.9};
    const auto curve = build_equivalence_curve(in, eps, rhos);
    CHECK(curve.rho_grid.front() == 0.0);
    CHECK(curve.eps_grid.front() == 0.0);
    CHECK(curve.addon_rho[0] == 0.0);
    CHECK(curve.rho_equiv[0] == 0.0);
    for (std::size_t k = 1; k < curve.rho_equiv.size(); ++k) CHECK(curve.rho_equiv[k] >= curve.rho_equiv[k - 1]);
    for (std::size_t k = 1; k < curve.rho_grid.size(); ++k) {
        if (curve.addon_rho_fit[k] <= curve.addon_rho_fit[k - 1]) continue;
        CHECK(invert_addon(curve.rho_grid, curve.addon_rho_fit, curve.addon_rho_fit[k], nullptr) ==
              doctest::Approx(curve.rho_grid[k]).epsilon(1e-12));
    }
    const auto result = build_equivalence_and_invert(in, eps, rhos, 0.0);
    CHECK(result.eps_star == 0.0);
}

}
