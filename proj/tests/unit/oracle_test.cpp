// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "airs/oracle.hpp"
#include "support.hpp"

using namespace airs;
using namespace airs::oracle;

TEST_SUITE("oracle") {

TEST_CASE("without an amplification budget the grid finds the direct-link closed forms") {
    SUBCASE("one device in its own slot") {
        Scenario sc = test::small_scenario(1, 2);
        sc.P_r = sc.sigma_r2 * 1e-9;
        const ChannelSet ch = generate_channels(sc, 3);
        const GridOptimum g = brute_force(ch, sc, Scheme::tdma, {});
        const double direct = sc.T_max * std::log2(1.0 + sc.E[0] * std::norm(ch.h_d[0]) / (sc.T_max * sc.sigma2));
        CHECK(g.objective >= direct * (1.0 - 1e-12));
        CHECK(g.objective == doctest::Approx(direct).epsilon(1e-6));
        CHECK(g.tau[0] == doctest::Approx(sc.T_max));
    }
    SUBCASE("two devices sharing the frame") {
        Scenario sc = test::small_scenario(2, 2);
        sc.P_r = sc.sigma_r2 * 1e-9;
        const ChannelSet ch = generate_channels(sc, 5);
        const GridOptimum g = brute_force(ch, sc, Scheme::noma, {});
        double snr = 0.0;
        for (int k = 0; k < 2; ++k) snr += sc.E[k] * std::norm(ch.h_d[k]) / (sc.T_max * sc.sigma2);
        const double direct = sc.T_max * std::log2(1.0 + snr);
        CHECK(g.objective >= direct * (1.0 - 1e-12));
        CHECK(g.objective == doctest::Approx(direct).epsilon(1e-6));
    }
}

TEST_CASE("nested refinement never loses and changes little") {
    const Scenario sc = test::small_scenario(2, 2);
    const ChannelSet ch = generate_channels(sc, 7);
    GridSpec coarse;
    coarse.phase_levels = 8;
    coarse.amplitude_levels = 10;
    coarse.time_levels = 20;
    GridSpec fine = coarse;
    fine.phase_levels = 16;
    fine.amplitude_levels = 20;
    fine.time_levels = 40;
    for (Scheme s : {Scheme::tdma, Scheme::noma}) {
        const double a = brute_force(ch, sc, s, coarse).objective;
        const double b = brute_force(ch, sc, s, fine).objective;
        CHECK(b >= a);
        CHECK((b - a) / b < 0.005);
    }
}

TEST_CASE("hybrid grid over singleton groups equals the TDMA grid") {
    const Scenario sc = test::small_scenario(2, 2);
    const ChannelSet ch = generate_channels(sc, 2);
    const hybrid::Grouping g = hybrid::partition_devices(2, 2, hybrid::GroupingStrategy::round_robin);
    GridSpec levels;
    levels.phase_levels = 8;
    // singleton knapsacks can leave energy unused, so hybrid is at least the depleting TDMA grid
    CHECK(brute_force(ch, sc, Scheme::hybrid, levels, &g).objective >= brute_force(ch, sc, Scheme::tdma, levels).objective * (1 - 1e-12));
    CHECK_THROWS_AS(brute_force(ch, sc, Scheme::hybrid, levels), std::invalid_argument);
}

TEST_CASE("point count and guard") {
    const Scenario sc = test::small_scenario(2, 2);
    const ChannelSet ch = generate_channels(sc, 1);
    GridSpec levels;
    levels.phase_levels = 4;
    const GridOptimum g = brute_force(ch, sc, Scheme::tdma, levels);
    CHECK(g.points == grid_points(ch, Scheme::tdma, levels, 2));
    CHECK(grid_points(ch, Scheme::tdma, levels, 2) == 2.0 * 20 * 16 * 11);
    CHECK(grid_points(ch, Scheme::noma, levels, 1) == 16.0 * 21);
    levels.max_points = 100;
    CHECK_THROWS_AS(brute_force(ch, sc, Scheme::tdma, levels), GridTooLarge);
}

TEST_CASE("threads do not change the grid optimum") {
    const Scenario sc = test::small_scenario(2, 2);
    const ChannelSet ch = generate_channels(sc, 11);
    GridSpec one;
    one.phase_levels = 8;
    GridSpec four = one;
    four.workers = 4;
    const GridOptimum a = brute_force(ch, sc, Scheme::tdma, one);
    const GridOptimum b = brute_force(ch, sc, Scheme::tdma, four);
    CHECK(a.objective == b.objective);
    CHECK(a.tau == b.tau);
    CHECK(a.v == b.v);
}

TEST_CASE("vertex enumeration") {
    convex::KnapsackLp lp;
    lp.c = (VectorXd(3) << 2.0, 3.0, 1.0).finished();
    lp.a = (VectorXd(3) << 1.0, 2.0, 1.0).finished();
    lp.u = (VectorXd(3) << 1.0, 1.0, 1.0).finished();
    lp.b = 2.0;
    // ratios 2, 1.5, 1: take device 0 fully, then half of device 1
    const LpOptimum r = vertex_enumerate_lp(lp);
    CHECK(r.objective == doctest::Approx(3.5));
    CHECK(r.p[0] == doctest::Approx(1.0));
    CHECK(r.p[1] == doctest::Approx(0.5));
    CHECK(r.p[2] == doctest::Approx(0.0));
}

TEST_CASE("fractional bisection matches the one-element scalar search") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Scenario sc = test::small_scenario(1, 1);
        const ChannelSet ch = generate_channels(sc, seed);
        const double p = sc.E[0] / sc.T_max;
        CHECK(fractional_sinr_bisection({p}, ch, sc) ==
              doctest::Approx(test::single_element_snr(ch, 0, p, sc)).epsilon(1e-5));
    }
}

TEST_CASE("equal-SNR allocation") {
    const std::vector<double> s{0.02, 0.05, 0.13};
    const EqualSnr r = equal_snr_allocation(s, 0.1);
    CHECK(r.objective == doctest::Approx(0.1 * std::log2(1.0 + 0.2 / 0.1)).epsilon(1e-14));
    CHECK(r.tau[0] == doctest::Approx(0.01));
    CHECK(r.tau[2] == doctest::Approx(0.065));

    // a direct scan over the two-slot split agrees
    const std::vector<double> two{0.3, 0.1};
    double best = 0.0;
    test::golden_max(
        [&](double t) {
            const double v = t * std::log2(1.0 + two[0] / t) + (0.1 - t) * std::log2(1.0 + two[1] / (0.1 - t));
            best = std::max(best, v);
            return v;
        },
        1e-9, 0.1 - 1e-9);
    CHECK(equal_snr_allocation(two, 0.1).objective == doctest::Approx(best).epsilon(1e-10));
    CHECK_THROWS_AS(equal_snr_allocation({-1.0}, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(equal_snr_allocation({1.0}, 0.0), std::invalid_argument);
}

} // TEST_SUITE
