#include <cmath>

#include "doctest.h"

#include "envcva/credit_curves.hpp"
#include "envcva/error.hpp"
#include "envcva/time_grid.hpp"

using namespace envcva;

namespace {

// Fine-grid leg integration with continuous premium; root by bisection.
double brute_force_hazard(double spread, double recovery, double maturity, double rate) {
    auto gap = [&](double lambda) {
        const int steps = 20000;
        const double h = maturity / steps;
        double premium = 0.0, protection = 0.0;
        for (int k = 0; k < steps; ++k) {
            const double t = (k + 0.5) * h;
            const double w = std::exp(-(lambda + rate) * t) * h;
            premium += w;
            protection += (1.0 - recovery) * lambda * w;
        }
        return spread * premium - protection;
    };
    double lo = 1e-9, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_SUITE("credit_curves") {

TEST_CASE("flat hazard calibration matches the credit triangle") {
    const auto curve = DiscountCurve::flat(0.03);
    const double lambda = calibrate_flat_hazard({0.008, 0.4, 5.0, 4}, curve);
    CHECK(std::abs(lambda - 0.0133) < 5e-4);
    CHECK(std::abs(lambda - 0.008 / 0.6) < 5e-4);
    CHECK(cds_par_spread(lambda, {0.008, 0.4, 5.0, 4}, curve) == doctest::Approx(0.008).epsilon(1e-9));
}

TEST_CASE("zero spread gives zero intensity") {
    CHECK(calibrate_flat_hazard({0.0, 0.4, 5.0, 4}, DiscountCurve::flat(0.03)) == 0.0);
    const double tiny = calibrate_flat_hazard({1e-7, 0.4, 5.0, 4}, DiscountCurve::flat(0.03));
    CHECK(tiny < 2e-7);
}

TEST_CASE("calibration agrees with fine-grid leg integration") {
    const double oracle = brute_force_hazard(0.012, 0.4, 5.0, 0.0);
    const double lambda = calibrate_flat_hazard({0.012, 0.4, 5.0, 4}, DiscountCurve::flat(0.0));
    CHECK(std::abs(lambda - oracle) < 5e-4);
    CHECK(std::abs(lambda - 0.02) < 5e-4);
    const double oracle_r = brute_force_hazard(0.02, 0.35, 10.0, 0.05);
    CHECK(std::abs(calibrate_flat_hazard({0.02, 0.35, 10.0, 4}, DiscountCurve::flat(0.05)) - oracle_r) < 5e-4);
}

TEST_CASE("calibration input validation") {
    const auto curve = DiscountCurve::flat(0.03);
    CHECK_THROWS_AS(calibrate_flat_hazard({-0.01, 0.4, 5.0, 4}, curve), ValidationError);
    CHECK_THROWS_AS(calibrate_flat_hazard({0.01, 1.0, 5.0, 4}, curve), ValidationError);
    CHECK_THROWS_AS(calibrate_flat_hazard({0.01, 0.4, 5.1, 4}, curve), ValidationError);
    // Spread beyond what intensity 10 can pay.
    CHECK_THROWS_AS(calibrate_flat_hazard({50.0, 0.4, 5.0, 4}, curve), NumericError);
}

TEST_CASE("survival curves") {
    const auto grid = make_uniform_grid(5.0, 0.25);
    CHECK(survival_curve(flat_hazard(grid, 0.0133)).survival.back() == doctest::Approx(0.9356629159).epsilon(1e-9));
    for (const double s : survival_curve(flat_hazard(grid, 0.0)).survival) CHECK(s == 1.0);
    const std::vector<double> g{0.0, 1.0, 2.0};
    CHECK(survival_curve(flat_hazard(g, 0.1)).survival[2] == doctest::Approx(0.8187307531).epsilon(1e-9));
    CHECK_THROWS_AS(flat_hazard(g, -0.1), ValidationError);
}

TEST_CASE("multipliers scale intensities on the shared grid") {
    const std::vector<double> g{0.0, 5.0, 10.0};
    const auto base = flat_hazard(g, 0.0133);
    const MultiplierPath unit{g, {1.0, 1.0, 1.0}, "ref"};
    CHECK(apply_multiplier(base, unit).intensities == base.intensities);
    const MultiplierPath delayed{g, {1.0, 1.2, 1.4812}, "DT"};
    CHECK(apply_multiplier(base, delayed).intensities[2] == doctest::Approx(0.01969996).epsilon(1e-12));
    const MultiplierPath capped{g, {20.0, 20.0, 20.0}, "cap", {0.05, 20.0}};
    CHECK(apply_multiplier(base, capped).intensities[1] == doctest::Approx(0.266));
    const MultiplierPath off{{0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}, "x"};
    CHECK_THROWS_AS(apply_multiplier(base, off), ValidationError);
}

TEST_CASE("interval masses") {
    const auto m = interval_default_probs({{0.0, 1.0, 2.0}, {1.0, 0.9, 0.8}});
    CHECK(m.dp[0] == doctest::Approx(0.1));
    CHECK(m.dp[1] == doctest::Approx(0.1));
    CHECK(m.survivor == 0.8);
    const auto none = interval_default_probs(survival_curve(flat_hazard({0.0, 1.0, 2.0}, 0.0)));
    CHECK(none.dp == std::vector<double>{0.0, 0.0});
    CHECK(none.survivor == 1.0);
    const auto f = interval_default_probs(survival_curve(flat_hazard({0.0, 1.0, 2.0}, 0.05)));
    CHECK(f.dp[0] == doctest::Approx(0.0487705755).epsilon(1e-9));
    CHECK(f.dp[1] == doctest::Approx(0.0463920065).epsilon(1e-9));
    const auto cum = f.cumulative();
    CHECK(cum.back() + f.survivor == doctest::Approx(1.0).epsilon(1e-15));
}

}
