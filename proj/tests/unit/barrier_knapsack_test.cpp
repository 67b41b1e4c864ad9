// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "airs/barrier.hpp"
#include "airs/counter_rng.hpp"
#include "airs/knapsack.hpp"
#include "airs/oracle.hpp"
#include "support.hpp"

using namespace airs;
using namespace airs::convex;

namespace {

BarrierConstraint upper(int i, double bound) {
    BarrierConstraint c;
    c.affine = {{{i, 1.0}}, -bound};
    return c;
}

BarrierConstraint lower(int i, double bound) {
    BarrierConstraint c;
    c.affine = {{{i, -1.0}}, bound};
    return c;
}

double rate(double tau, double s) { return tau > 0.0 ? tau * std::log2(1.0 + s / tau) : 0.0; }

void check_path(const BarrierProblem& p, const BarrierResult& r) {
    REQUIRE(r.status == SolveStatus::optimal);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1] - 1e-12);
    CHECK(p.max_violation(r.x) <= 0.0);
}

} // namespace

TEST_SUITE("barrier") {

TEST_CASE("single perspective term with box bounds") {
    BarrierProblem p;
    p.num_vars = 2;  // tau, S
    p.terms.push_back({1.0, {{{0, 1.0}}, 0.0}, {{{1, 1.0}}, 0.0}});
    p.constraints = {upper(0, 1.0), upper(1, 1.0), lower(0, 0.0), lower(1, 0.0)};
    VectorXd x0(2);
    x0 << 0.5, 0.5;
    const BarrierResult r = solve_barrier(p, x0);
    check_path(p, r);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.gap_bound <= SolverOptions{}.tol_gap);
}

TEST_CASE("identical slots split the time equally") {
    const double T = 0.1, s = 2e-3;
    BarrierProblem p;
    p.num_vars = 4;  // tau1, tau2, S1, S2
    for (int l = 0; l < 2; ++l) {
        p.terms.push_back({1.0, {{{l, 1.0}}, 0.0}, {{{2 + l, 1.0}}, 0.0}});
        p.constraints.push_back(upper(2 + l, s));
        p.constraints.push_back(lower(2 + l, 0.0));
        p.constraints.push_back(lower(l, 0.0));
    }
    BarrierConstraint time;
    time.affine = {{{0, 1.0}, {1, 1.0}}, -T};
    p.constraints.push_back(time);
    VectorXd x0(4);
    x0 << 0.01, 0.07, 1e-3, 1e-4;
    const BarrierResult r = solve_barrier(p, x0);
    check_path(p, r);
    CHECK(r.x[0] == doctest::Approx(T / 2).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(T / 2).epsilon(1e-6));
}

TEST_CASE("two-device slot problem with fixed beams matches a grid search") {
    // max sum tau_k log2(1 + S_k / tau_k) with S_k <= u_k, tau_k >= l_k, tau_1 + tau_2 <= T
    const double T = 0.1;
    const double u[2] = {0.35, 0.08};
    const double lo[2] = {0.004, 0.071};  // second device's amplification limit binds
    BarrierProblem p;
    p.num_vars = 4;
    for (int k = 0; k < 2; ++k) {
        p.terms.push_back({1.0, {{{k, 1.0}}, 0.0}, {{{2 + k, 1.0}}, 0.0}});
        p.constraints.push_back(upper(2 + k, u[k]));
        p.constraints.push_back(lower(2 + k, 0.0));
        p.constraints.push_back(lower(k, lo[k]));
    }
    BarrierConstraint time;
    time.affine = {{{0, 1.0}, {1, 1.0}}, -T};
    p.constraints.push_back(time);
    VectorXd x0(4);
    x0 << 0.01, 0.08, 0.1, 0.01;
    const BarrierResult r = solve_barrier(p, x0);
    check_path(p, r);

    double best = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t1 = T * i / 1000.0, t2 = T - t1;
        if (t1 < lo[0] || t2 < lo[1]) continue;
        for (int a = 0; a <= 100; ++a)
            for (int b = 0; b <= 100; ++b)
                best = std::max(best, rate(t1, u[0] * a / 100.0) + rate(t2, u[1] * b / 100.0));
    }
    // the grid is a lower bound on the optimum, which the barrier certifies to within gap_bound
    CHECK(r.objective + r.gap_bound >= best);
    CHECK(r.objective == doctest::Approx(best).epsilon(1e-3));
}

TEST_CASE("quadratic-over-time constraint") {
    // max tau log2(1 + S/tau) with S <= x, x^2 / tau <= 0.02, tau <= 0.1
    BarrierProblem p;
    p.num_vars = 3;  // tau, S, x
    p.terms.push_back({1.0, {{{0, 1.0}}, 0.0}, {{{1, 1.0}}, 0.0}});
    BarrierConstraint link;
    link.affine = {{{1, 1.0}, {2, -1.0}}, 0.0};
    BarrierConstraint energy;
    energy.time_index = 0;
    energy.over_time = {{2, 2, 1.0}};
    energy.affine.constant = -0.02;
    p.constraints = {link, energy, upper(0, 0.1), lower(1, 0.0)};
    VectorXd x0(3);
    x0 << 0.05, 0.001, 0.01;
    const BarrierResult r = solve_barrier(p, x0);
    check_path(p, r);
    // at the optimum tau = 0.1 and x = sqrt(0.002)
    CHECK(r.x[0] == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(std::sqrt(0.002)).epsilon(1e-6));
}

TEST_CASE("infeasible start is reported, not repaired") {
    BarrierProblem p;
    p.num_vars = 2;
    p.terms.push_back({1.0, {{{0, 1.0}}, 0.0}, {{{1, 1.0}}, 0.0}});
    p.constraints = {upper(0, 1.0), upper(1, 1.0), lower(0, 0.0), lower(1, 0.0)};
    VectorXd x0(2);
    x0 << 2.0, 0.5;
    CHECK(solve_barrier(p, x0).status == SolveStatus::infeasible_start);
}

TEST_CASE("validation") {
    BarrierProblem p;
    p.num_vars = 1;
    p.constraints.push_back(upper(3, 1.0));
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    BarrierProblem q;
    q.num_vars = 2;
    BarrierConstraint bad;
    bad.time_index = 0;
    bad.over_time = {{0, 1, 1.0}};
    q.constraints.push_back(bad);
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

} // TEST_SUITE

TEST_SUITE("knapsack") {

TEST_CASE("single device") {
    KnapsackLp lp;
    lp.c = VectorXd::Constant(1, 1.0);
    lp.a = VectorXd::Constant(1, 1.0);
    lp.u = VectorXd::Constant(1, 5.0);
    lp.b = 2.0;
    CHECK(solve_knapsack(lp)[0] == doctest::Approx(2.0));
}

TEST_CASE("fills by ratio") {
    KnapsackLp lp;
    lp.c = (VectorXd(2) << 3.0, 1.0).finished();
    lp.a = (VectorXd(2) << 1.0, 1.0).finished();
    lp.u = (VectorXd(2) << 1.0, 1.0).finished();
    lp.b = 1.5;
    const VectorXd p = solve_knapsack(lp);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.5));
    CHECK(lp.objective(p) == doctest::Approx(oracle::vertex_enumerate_lp(lp).objective));
}

TEST_CASE("weightless entries go to their bound") {
    KnapsackLp lp;
    lp.c = (VectorXd(2) << 1.0, 1.0).finished();
    lp.a = (VectorXd(2) << 0.0, 1.0).finished();
    lp.u = (VectorXd(2) << 4.0, 4.0).finished();
    lp.b = 1.0;
    const VectorXd p = solve_knapsack(lp);
    CHECK(p[0] == doctest::Approx(4.0));
    CHECK(p[1] == doctest::Approx(1.0));
    CHECK(lp.objective(p) == doctest::Approx(oracle::vertex_enumerate_lp(lp).objective));
}

TEST_CASE("random instances match vertex enumeration and resist pairwise exchanges") {
    CounterRng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const int K = 1 + trial % 8;
        KnapsackLp lp;
        lp.c.resize(K);
        lp.a.resize(K);
        lp.u.resize(K);
        for (int k = 0; k < K; ++k) {
            lp.c[k] = rng.uniform();
            lp.a[k] = trial % 5 == 0 && k == 0 ? 0.0 : rng.uniform();
            lp.u[k] = rng.uniform() * 2.0;
        }
        lp.b = rng.uniform() * lp.a.dot(lp.u);
        const VectorXd p = solve_knapsack(lp);
        CHECK((p.array() >= -1e-15).all());
        CHECK((p.array() <= lp.u.array() + 1e-15).all());
        CHECK(lp.a.dot(p) <= lp.b * (1.0 + 1e-12) + 1e-15);
        CHECK(lp.objective(p) == doctest::Approx(oracle::vertex_enumerate_lp(lp).objective).epsilon(1e-12));

        // moving eps of budget from device i to device j never helps
        const double eps = 1e-6;
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j) {
                if (i == j || lp.a[i] == 0.0 || lp.a[j] == 0.0) continue;
                VectorXd q = p;
                q[i] -= eps / lp.a[i];
                q[j] += eps / lp.a[j];
                if (q[i] < 0.0 || q[j] > lp.u[j]) continue;
                CHECK(lp.objective(q) <= lp.objective(p) + 1e-15);
            }
    }
}

TEST_CASE("validation") {
    KnapsackLp lp;
    lp.c = VectorXd::Constant(2, 1.0);
    lp.a = VectorXd::Constant(1, 1.0);
    lp.u = VectorXd::Constant(2, 1.0);
    CHECK_THROWS_AS(solve_knapsack(lp), std::invalid_argument);
    lp.a = VectorXd::Constant(2, -1.0);
    CHECK_THROWS_AS(solve_knapsack(lp), std::invalid_argument);
}

} // TEST_SUITE
