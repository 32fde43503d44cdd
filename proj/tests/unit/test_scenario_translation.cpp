#include <cmath>

#include "doctest.h"

#include "envcva/error.hpp"
#include "envcva/scenario_translation.hpp"

using namespace envcva;

TEST_SUITE("scenario_translation") {

TEST_CASE("climate multiplier") {
    const std::vector<double> grid{0.0, 10.0};
    const std::map<std::string, double> betas{{"GDP", -0.6}, {"Carbon", 0.15}};
    DriverSet ref{{"GDP", {100.0, {100.0, 100.0}}}, {"Carbon", {50.0, {50.0, 50.0}}}};
    DriverSet s{{"GDP", {100.0, {100.0, 90.0}}}, {"Carbon", {50.0, {50.0, 200.0}}}};
    const auto same = climate_multiplier(ref, ref, betas, grid, "ref");
    CHECK(same.path.values == std::vector<double>{1.0, 1.0});
    const auto m = climate_multiplier(s, ref, betas, grid, "DT");
    CHECK(m.path.values[0] == 1.0);
    CHECK(m.path.values[1] == doctest::Approx(1.3114854991).epsilon(1e-9));
    CHECK_FALSE(m.safety_cap_hit);
    DriverSet missing{{"GDP", {100.0, {100.0, 90.0}}}};
    CHECK_THROWS_AS(climate_multiplier(missing, ref, betas, grid, "x"), DataError);
}

TEST_CASE("nature policy multiplier") {
    const std::vector<double> flat{1.0, 1.0, 1.0};
    const std::vector<double> s{1.0, 0.9, 0.8};
    const ClipBounds clip{0.05, 20.0};
    const auto same = nature_policy_multiplier(s, s, 1.0, clip, "ref");
    for (const double v : same.values) CHECK(v == 1.0);
    CHECK(nature_policy_multiplier(s, flat, 1.0, clip, "s").values[2] == doctest::Approx(1.25));
    const std::vector<double> crash{1.0, 0.01};
    const std::vector<double> flat2{1.0, 1.0};
    CHECK(nature_policy_multiplier(crash, flat2, 1.0, clip, "s").values[1] == 20.0);
    const std::vector<double> boom{1.0, 1000.0};
    CHECK(nature_policy_multiplier(boom, flat2, 1.0, clip, "s").values[1] == 0.05);
    CHECK_THROWS_AS(nature_policy_multiplier(s, flat, 1.0, {0.0, 20.0}, "s"), ValidationError);
}

TEST_CASE("good-state map inverts bad-is-up indicators") {
    const std::vector<double> x{2.0, 4.0};
    CHECK(to_good_state(x) == std::vector<double>{0.5, 0.25});
    CHECK(policy_stress(to_good_state(x))[1] == doctest::Approx(2.0));
}

TEST_CASE("two-stage transmission point checks") {
    const TwoStageParams p; // omega 1, alpha 1, c 0.65, beta_pd 2, k_R 0.05, R0 0.4
    const std::vector<double> grid{0.0, 1.0, 2.0};
    const std::vector<double> none;
    const std::vector<double> unit{1.0, 1.0, 1.0};
    const auto flat = two_stage_transmission(unit, none, p, grid, "ref");
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(flat.multiplier.values[i] == 1.0);
        CHECK(flat.recovery.recovery[i] == 0.4);
    }
    const std::vector<double> cr{1.0, 0.89, 1.084};
    const auto r = two_stage_transmission(cr, none, p, grid, "s");
    CHECK(r.badness[1] == doctest::Approx(0.3772942311).epsilon(1e-9));
    CHECK(r.multiplier.values[1] == doctest::Approx(2.1267361111).epsilon(1e-9));
    CHECK(r.recovery.recovery[1] == doctest::Approx(0.3811352884).epsilon(1e-9));
    CHECK(r.badness[2] == doctest::Approx(-0.2151113796).epsilon(1e-9));
    CHECK(r.multiplier.values[2] == doctest::Approx(0.6503642040).epsilon(1e-9));
    CHECK(r.recovery.recovery[2] == 0.4);
}

TEST_CASE("two-stage wiped-out margin pins at the bounds") {
    const TwoStageParams p;
    const std::vector<double> grid{0.0, 1.0};
    const std::vector<double> cr{1.0, 0.5};
    const auto r = two_stage_transmission(cr, {}, p, grid, "s");
    CHECK(r.wiped_out_points == 1);
    CHECK(r.multiplier.values[1] == 8.0);
    CHECK(r.recovery.recovery[1] == 0.05);
    CHECK(std::isinf(r.badness[1]));
    TwoStageParams bad;
    bad.cost_share = 1.0;
    CHECK_THROWS_AS(two_stage_transmission(cr, {}, bad, grid, "s"), ValidationError);
}

TEST_CASE("tail factors") {
    const auto panel = [](std::string label, double v) { return ProviderPathPanel{std::move(label), {2025, 2050}, {1.0, v}}; };
    const std::vector<ProviderPathPanel> same{panel("a", 2.0), panel("b", 2.0)};
    for (const auto mode : {TailMode::one_sided, TailMode::two_sided})
        for (const auto& f : tail_factors(same, mode).factors) CHECK(f == std::vector<double>{1.0, 1.0});
    const std::vector<ProviderPathPanel> three{panel("a", 1.0), panel("b", 2.0), panel("c", 4.0)};
    const auto two = tail_factors(three, TailMode::two_sided);
    CHECK(two.factors[0][1] == 0.5);
    CHECK(two.factors[1][1] == 1.0);
    CHECK(two.factors[2][1] == 2.0);
    const auto one = tail_factors(three, TailMode::one_sided);
    CHECK(one.factors[0][1] == 1.0);
    CHECK(one.factors[2][1] == 2.0);
    CHECK(parse_tail_mode("one-sided") == TailMode::one_sided);
    CHECK_THROWS_AS(parse_tail_mode("both"), ValidationError);
}

TEST_CASE("hybrid multiplier") {
    const std::vector<double> ss{1.0, 1.25};
    const std::vector<double> sr{1.0, 1.0};
    const std::vector<double> ones{1.0, 1.0};
    const ClipBounds clip{0.05, 20.0};
    const auto policy = nature_policy_multiplier(std::vector<double>{1.0, 0.8}, ones, 1.0, clip, "s");
    CHECK(hybrid_multiplier(ss, sr, ones, 1.0, clip, "s").values == policy.values);
    CHECK(hybrid_multiplier(ss, sr, std::vector<double>{1.0, 1.6}, 1.0, clip, "s").values[1] == doctest::Approx(2.0));
    CHECK(hybrid_multiplier(ss, sr, std::vector<double>{1.0, 100.0}, 1.0, clip, "s").values[1] == 20.0);
}

TEST_CASE("annual paths become step functions on the engine grid") {
    const std::vector<double> annual{1.0, 2.0, 3.0};
    const std::vector<double> grid{0.0, 0.5, 0.99, 1.0, 2.5, 7.0};
    CHECK(annual_to_grid(annual, grid) == std::vector<double>{1.0, 1.0, 1.0, 2.0, 3.0, 3.0});
}

}
