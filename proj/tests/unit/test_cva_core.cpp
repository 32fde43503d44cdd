#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "envcva/cva_core.hpp"
#include "envcva/error.hpp"
#include "envcva/rng.hpp"
#include "envcva/time_grid.hpp"

using namespace envcva;

namespace {

ExposureCube random_cube(std::size_t paths, const std::vector<double>& grid, std::uint64_t seed) {
    const CounterRng rng(seed);
    std::vector<double> e(paths * grid.size());
    for (std::size_t p = 0; p < paths; ++p)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto [z, unused] = rng.normal2(p, i);
            e[p * grid.size() + i] = std::max(0.0, z * std::sqrt(grid[i]) * (grid.back() - grid[i]));
        }
    std::vector<double> df(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) df[i] = std::exp(-0.03 * grid[i]);
    return testing::make_cube(grid, paths, std::move(e), std::move(df));
}

} // namespace

TEST_SUITE("cva_core") {

TEST_CASE("single-term closed form") {
    const auto cube = testing::make_cube({0.0, 1.0}, 1, {0.0, 100.0});
    const SurvivalCurve s{{0.0, 1.0}, {1.0, 0.9}};
    CHECK(independence_cva(cube, s, 0.4, 1.0, "x").cva == doctest::Approx(6.0));
    const SurvivalCurve none{{0.0, 1.0}, {1.0, 1.0}};
    CHECK(independence_cva(cube, none, 0.4, 1.0, "x").cva == 0.0);
    CHECK(independence_cva(cube, s, 1.0, 1.0, "x").cva == 0.0);
    CHECK(make_cva_result(0.0012, 0.0, 10.0, "x").cva_bp == doctest::Approx(1.2));
}

TEST_CASE("profile route equals the cube route") {
    const auto grid = make_uniform_grid(5.0, 0.25);
    const auto cube = random_cube(3000, grid, 4);
    const auto surv = survival_curve(flat_hazard(grid, 0.05));
    const auto rec = constant_recovery(grid, 0.4);
    const auto a = independence_cva(cube, surv, rec, 1.0, "s");
    const auto b = independence_cva(ExposureProfile::from_cube(cube), surv, rec, 1.0, "s");
    CHECK(a.cva == b.cva);
    CHECK(a.standard_error == doctest::Approx(b.standard_error).epsilon(1e-9));
}

TEST_CASE("loss sampler") {
    const auto grid = make_uniform_grid(5.0, 0.25);
    const auto cube = random_cube(3000, grid, 5);
    const auto zero = sample_losses(cube, survival_curve(flat_hazard(grid, 0.0)), 0.4, 5000, 1, 1.0, "z");
    for (const double l : zero.losses) REQUIRE(l == 0.0);

    const auto surv = survival_curve(flat_hazard(grid, 0.08));
    const auto closed = independence_cva(cube, surv, 0.4, 1.0, "s");
    const auto draws = sample_losses(cube, surv, 0.4, 50000, 99, 1.0, "s");
    CHECK(std::abs(draws.mean() - closed.cva) < 3.0 * draws.standard_error());

    const auto scalar = sample_losses(cube, surv, 0.4, 2000, 7, 1.0, "s");
    const auto path = sample_losses(cube, surv, constant_recovery(grid, 0.4), 2000, 7, 1.0, "s");
    CHECK(scalar.losses == path.losses);
    CHECK(scalar.interval == path.interval);
    const auto again = sample_losses(cube, surv, 0.4, 2000, 7, 1.0, "s");
    CHECK(scalar.losses == again.losses);
}

TEST_CASE("sampled default intervals follow the masses") {
    const std::vector<double> grid{0.0, 1.0, 2.0, 3.0};
    const auto cube = testing::make_cube(grid, 2, std::vector<double>(8, 1.0));
    const auto surv = survival_curve(flat_hazard(grid, 0.3));
    const auto masses = interval_default_probs(surv);
    const std::size_t n = 100000;
    const auto draws = sample_losses(cube, surv, 0.0, n, 12, 1.0, "s");
    std::vector<double> freq(grid.size(), 0.0);
    for (const auto i : draws.interval) freq[i] += 1.0 / n;
    CHECK(std::abs(freq[0] - masses.survivor) < 3.0 * std::sqrt(masses.survivor * (1 - masses.survivor) / n));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double p = masses.dp[i - 1];
        CHECK(std::abs(freq[i] - p) < 3.0 * std::sqrt(p * (1 - p) / n));
    }
}

TEST_CASE("ECVA relative") {
    const auto a = make_cva_result(0.002, 0.0, 1.0, "s");
    CHECK(ecva_relative(a, a) == 0.0);
    const auto grid = make_uniform_grid(3.0, 0.5);
    const auto cube = random_cube(500, grid, 2);
    const auto ref = independence_cva(cube, survival_curve(flat_hazard(grid, 0.02)), 0.4, 1.0, "ref");
    const MultiplierPath up{grid, std::vector<double>(grid.size(), 1.5), "s"};
    const auto s = independence_cva(cube, survival_curve(apply_multiplier(flat_hazard(grid, 0.02), up)), 0.4, 1.0, "s");
    CHECK(ecva_relative(s, ref) >= 0.0);
    CHECK_THROWS_AS(ecva_relative(make_cva_result(1, 0, 2.0, "a"), a), ValidationError);
}

TEST_CASE("distribution summary conventions") {
    const std::vector<double> c(10, -2.5);
    const auto s = distribution_summary(c, -2.5);
    CHECK(s.median == -2.5);
    CHECK(s.var99 == -2.5);
    CHECK(s.es95 == -2.5);
    CHECK(s.prob_negative == 1.0);
    std::vector<double> x;
    for (int i = 1; i <= 100; ++i) x.push_back(i);
    const auto h = distribution_summary(x, 0.0);
    CHECK(h.var95 == 95.0);
    CHECK(h.es95 == doctest::Approx(97.5));
    CHECK(h.var99 == 99.0);
    CHECK(h.es99 == doctest::Approx(99.5));
    CHECK(h.prob_negative == 0.0);
    CHECK(h.n == 100);
}

TEST_CASE("corner decomposition") {
    const auto d = corner_decomposition(15.13, 17.78, 0.59, 0.73);
    CHECK(d.credit == doctest::Approx(2.65));
    CHECK(d.market == doctest::Approx(-14.54));
    CHECK(d.interaction == doctest::Approx(-2.51));
    CHECK(d.total == doctest::Approx(-14.40));
    CHECK(d.interaction_share == doctest::Approx(0.1743).epsilon(1e-3));
    CHECK(d.credit + d.market + d.interaction == d.total);
    const auto flat = corner_decomposition(3.0, 3.0, 3.0, 3.0);
    CHECK(flat.total == 0.0);
    CHECK(flat.interaction == 0.0);
    const auto additive = corner_decomposition(1.0 + 10.0, 2.0 + 10.0, 1.0 + 20.0, 2.0 + 20.0);
    CHECK(additive.interaction == doctest::Approx(0.0).epsilon(1e-14));
}

}
