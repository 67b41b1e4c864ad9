// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "airs/barrier.hpp"
#include "airs/counter_rng.hpp"
#include "airs/harness.hpp"
#include "airs/hybrid.hpp"
#include "airs/noma.hpp"
#include "airs/oracle.hpp"
#include "airs/tdma.hpp"
#include "support.hpp"

using namespace airs;

namespace {

// pinned tolerances
constexpr double kDepletionTol = 1e-6;
constexpr double kOrderTol = 1e-6;
constexpr double kOracleSlack = 0.02;
constexpr double kRankRate = 0.99;
constexpr double kTraceTol = 1e-9;
constexpr double kEqualSnrTol = 1e-6;
constexpr double kDepletionSeconds = 300.0;
constexpr double kOracleSeconds = 1200.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// every trace seen by any criterion, checked by criterion 7
struct TraceLog {
    int traces = 0;
    int violations = 0;
    double worst = 0.0;
    std::string first_bad;

    void add(const std::vector<double>& t, const std::string& label) {
        ++traces;
        for (std::size_t i = 1; i < t.size(); ++i) {
            const double drop = t[i - 1] - t[i];
            if (drop > kTraceTol) {
                ++violations;
                if (first_bad.empty()) first_bad = label;
            }
            worst = std::max(worst, drop);
        }
    }
};

TraceLog traces;

std::string label(const char* what, int K, int N, std::uint64_t seed) {
    return fmt("%s K=%d N=%d seed=%llu", what, K, N, static_cast<unsigned long long>(seed));
}

Outcome energy_depletion() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const int K = 1 + i % 4, N = 1 + (i / 4) % 8;
        const std::uint64_t seed = 10000 + static_cast<std::uint64_t>(i);
        const Scenario sc = test::small_scenario(K, N);
        const ChannelSet ch = generate_channels(sc, seed);
        const tdma::TdmaSolution s = tdma::solve_tdma(ch, sc);
        traces.add(s.trace, label("tdma", K, N, seed));
        for (int k = 0; k < K; ++k) worst = std::max(worst, std::abs(s.tau[k] * s.p[k] - sc.E[k]) / sc.E[k]);
    }
    const double t = seconds_since(t0);
    return {worst <= kDepletionTol && t <= kDepletionSeconds,
            fmt("200 instances, max |tau p - E|/E = %.2e (tol %.0e), %.1f s (limit %.0f s)", worst, kDepletionTol, t,
                kDepletionSeconds)};
}

Outcome full_duration() {
    int short_frames = 0, drops = 0, points = 0;
    CounterRng rng(2024);
    for (int i = 0; i < 200; ++i) {
        const int K = 1 + i % 4, N = 1 + (i / 4) % 8;
        const std::uint64_t seed = 20000 + static_cast<std::uint64_t>(i);
        const Scenario sc = test::small_scenario(K, N);
        const ChannelSet ch = generate_channels(sc, seed);
        const noma::NomaSolution s = noma::solve_noma(ch, sc);
        traces.add(s.ao_trace, label("noma", K, N, seed));
        if (s.tau != sc.T_max) ++short_frames;

        // a random feasible point at the shortest duration stays feasible as tau grows
        std::vector<double> e(K);
        for (int k = 0; k < K; ++k) e[k] = sc.E[k] * rng.uniform();
        BeamVector v(N);
        for (int n = 0; n < N; ++n) v[n] = rng.complex_normal();
        const double tau_min = sc.T_max / 20.0;
        std::vector<int> all(K);
        std::vector<double> p(K);
        for (int k = 0; k < K; ++k) {
            all[k] = k;
            p[k] = e[k] / tau_min;
        }
        const double amp = amplification_power(v, all, p, ch, sc.sigma_r2);
        v *= std::sqrt(rng.uniform() * sc.P_r / amp);
        noma::NomaSolution probe;
        probe.v = v;
        double prev = -1.0;
        for (int j = 1; j <= 20; ++j) {
            probe.tau = tau_min * j;
            probe.p.resize(K);
            for (int k = 0; k < K; ++k) probe.p[k] = e[k] / probe.tau;
            const double value = noma::noma_throughput(probe, ch, sc);
            if (value < prev) ++drops;
            prev = value;
        }
        ++points;
    }
    return {short_frames == 0 && drops == 0,
            fmt("tau != T_max on %d/200 instances; %d decreases over %d random feasible points x 20 durations",
                short_frames, drops, points)};
}

Outcome shared_beam_ordering() {
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const int K = 2 + i % 2, N = (i / 2) % 2 ? 4 : 2;
        const std::uint64_t seed = 30000 + static_cast<std::uint64_t>(i);
        const Scenario sc = test::small_scenario(K, N);
        const ChannelSet ch = generate_channels(sc, seed);
        const tdma::TdmaSolution sb = tdma::solve_tdma_single_beam(ch, sc);
        const noma::NomaSolution nm = noma::solve_noma(ch, sc);
        traces.add(sb.trace, label("tdma_single", K, N, seed));
        traces.add(nm.ao_trace, label("noma", K, N, seed));
        const double gap = sb.objective - nm.objective;
        worst = std::max(worst, gap);
        if (gap > kOrderTol) ++violations;
    }
    return {violations == 0, fmt("NOMA below the shared-beam TDMA on %d/200 instances, max shortfall %.2e (tol %.0e)",
                                 violations, worst, kOrderTol)};
}

Outcome conditional_ordering() {
    int subset = 0, violations = 0, total = 0;
    double worst = -1e300;
    for (double dbm : {0.0, 40.0, 50.0, 60.0}) {
        for (int i = 0; i < 20; ++i) {
            const int K = 2 + i % 2, N = (i / 2) % 2 ? 4 : 2;
            const std::uint64_t seed = 40000 + static_cast<std::uint64_t>(i);
            Scenario sc = test::small_scenario(K, N);
            sc.P_r = dbm_to_watt(dbm);
            const ChannelSet ch = generate_channels(sc, seed);
            ++total;

            // condition: the shared-beam optimum without the amplification limit satisfies it anyway
            Scenario relaxed = sc;
            relaxed.P_r *= 1e6;
            const tdma::TdmaSolution free_beam = tdma::solve_tdma_single_beam(ch, relaxed);
            double excess = -1e300;
            for (int k = 0; k < K; ++k)
                excess = std::max(excess, amplification_power(free_beam.v[0], {k}, {free_beam.p[k]}, ch, sc.sigma_r2) - sc.P_r);
            if (excess > 1e-8 * sc.P_r) continue;

            ++subset;
            const tdma::TdmaSolution td = tdma::solve_tdma(ch, sc);
            const noma::NomaSolution nm = noma::solve_noma(ch, sc);
            traces.add(td.trace, label("tdma", K, N, seed));
            traces.add(nm.ao_trace, label("noma", K, N, seed));
            const double gap = nm.objective - td.objective;
            worst = std::max(worst, gap);
            if (gap > kOrderTol) ++violations;
        }
    }
    return {subset > 0 && violations == 0,
            fmt("condition holds on %d/%d instances (P_r 0-60 dBm); TDMA below NOMA on %d, max shortfall %.2e (tol %.0e)",
                subset, total, violations, subset ? worst : 0.0, kOrderTol)};
}

Outcome grid_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    int violations = 0;
    double worst[3] = {1e300, 1e300, 1e300};
    const hybrid::Grouping g = hybrid::partition_devices(2, 2, hybrid::GroupingStrategy::round_robin);
    for (int i = 0; i < 50; ++i) {
        const std::uint64_t seed = 50000 + static_cast<std::uint64_t>(i);
        const Scenario sc = test::small_scenario(2, 2);
        const ChannelSet ch = generate_channels(sc, seed);
        const oracle::GridSpec levels;

        const tdma::TdmaSolution td = tdma::solve_tdma(ch, sc);
        const noma::NomaSolution nm = noma::solve_noma(ch, sc);
        const hybrid::HybridSolution hy = hybrid::solve_hybrid(ch, sc, g);
        traces.add(td.trace, label("tdma", 2, 2, seed));
        traces.add(nm.ao_trace, label("noma", 2, 2, seed));
        traces.add(hy.ao_trace, label("hybrid", 2, 2, seed));
        const double solved[3] = {td.objective, nm.objective, hy.objective};
        const double grid[3] = {oracle::brute_force(ch, sc, oracle::Scheme::tdma, levels).objective,
                                oracle::brute_force(ch, sc, oracle::Scheme::noma, levels).objective,
                                oracle::brute_force(ch, sc, oracle::Scheme::hybrid, levels, &g).objective};
        for (int s = 0; s < 3; ++s) {
            worst[s] = std::min(worst[s], solved[s] / grid[s]);
            if (solved[s] < (1.0 - kOracleSlack) * grid[s]) ++violations;
        }
    }
    const double t = seconds_since(t0);
    return {violations == 0 && t <= kOracleSeconds,
            fmt("50 instances K=2 N=2, min solver/grid tdma %.4f noma %.4f hybrid %.4f (floor %.2f), %d below, %.1f s "
                "(limit %.0f s)",
                worst[0], worst[1], worst[2], 1.0 - kOracleSlack, violations, t, kOracleSeconds)};
}

Outcome rank_one_rate() {
    int exact = 0, crashes = 0;
    CounterRng rng(606);
    for (int i = 0; i < 500; ++i) {
        const int K = 1 + i % 4, N = 2 + (i / 4) % 9;
        const Scenario sc = test::small_scenario(K, N);
        const ChannelSet ch = generate_channels(sc, 60000 + static_cast<std::uint64_t>(i));
        std::vector<double> p(K);
        for (int k = 0; k < K; ++k) p[k] = sc.E[k] / sc.T_max * (0.05 + 0.95 * rng.uniform());
        try {
            const noma::BeamResult r = noma::beamforming_step(p, ch, sc);
            if (r.rank_exact) ++exact;
            if (!std::isfinite(r.sinr_sum)) ++crashes;
        } catch (const std::exception&) {
            ++crashes;
        }
    }
    return {exact >= kRankRate * 500 && crashes == 0,
            fmt("rank-one on %d/500 (need %.0f%%), %d failures in the fallback path", exact, 100 * kRankRate, crashes)};
}

Outcome monotone_traces() {
    // hybrid runs with several groups, on top of everything logged so far
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t seed = 70000 + static_cast<std::uint64_t>(i);
        const Scenario sc = test::small_scenario(6, 4);
        const ChannelSet ch = generate_channels(sc, seed);
        for (int L : {2, 3}) {
            const hybrid::HybridSolution h =
                hybrid::solve_hybrid(ch, sc, hybrid::partition_devices(6, L, hybrid::GroupingStrategy::round_robin));
            traces.add(h.ao_trace, label("hybrid", 6, 4, seed) + fmt(" L=%d", L));
        }
        const tdma::TdmaSolution sb = tdma::solve_tdma_single_beam(ch, sc);
        traces.add(sb.trace, label("tdma_single", 6, 4, seed));
    }
    return {traces.violations == 0,
            fmt("%d traces, %d decreases beyond %.0e, largest drop %.2e%s", traces.traces, traces.violations, kTraceTol,
                traces.worst, traces.first_bad.empty() ? "" : (" first at " + traces.first_bad).c_str())};
}

Outcome equal_snr_oracle() {
    CounterRng rng(808);
    double worst = 0.0;
    int failures = 0;
    for (int i = 0; i < 100; ++i) {
        const int K = 1 + i % 6;
        const double T = 0.1;
        std::vector<double> s(K);
        for (int k = 0; k < K; ++k) s[k] = std::pow(10.0, -3.0 + 3.0 * rng.uniform());

        // relaxed slot problem: max sum tau_k log2(1 + S_k / tau_k), S_k <= s_k, sum tau <= T
        convex::BarrierProblem p;
        p.num_vars = 2 * K;
        VectorXd x0(2 * K);
        convex::BarrierConstraint time;
        time.affine.constant = -T;
        for (int k = 0; k < K; ++k) {
            p.terms.push_back({1.0, {{{k, 1.0}}, 0.0}, {{{K + k, 1.0}}, 0.0}});
            convex::BarrierConstraint up, pos_s, pos_t;
            up.affine = {{{K + k, 1.0}}, -s[k]};
            pos_s.affine = {{{K + k, -1.0}}, 0.0};
            pos_t.affine = {{{k, -1.0}}, 0.0};
            p.constraints.insert(p.constraints.end(), {up, pos_s, pos_t});
            time.affine.terms.push_back({k, 1.0});
            x0[k] = 0.5 * T / K;
            x0[K + k] = 0.5 * s[k];
        }
        p.constraints.push_back(time);
        const convex::BarrierResult r = convex::solve_barrier(p, x0);
        traces.add(r.trace, fmt("barrier K=%d case %d", K, i));
        const double closed = oracle::equal_snr_allocation(s, T).objective;
        if (r.status != SolveStatus::optimal) {
            ++failures;
            continue;
        }
        const double rel = std::abs(r.objective - closed) / closed;
        worst = std::max(worst, rel);
        if (rel > kEqualSnrTol) ++failures;
    }
    return {failures == 0,
            fmt("100 cases, max relative difference %.2e (tol %.0e), %d failures", worst, kEqualSnrTol, failures)};
}

using Medians = std::map<std::pair<std::string, double>, double>;

Medians medians(const std::vector<harness::RunRecord>& records, int* errors) {
    std::map<std::pair<std::string, double>, std::vector<double>> groups;
    for (const auto& r : records) {
        if (r.flags.find("error:") != std::string::npos) ++*errors;
        groups[{r.scheme, r.axis_value}].push_back(r.objective);
    }
    Medians out;
    for (auto& [key, v] : groups) out[key] = test::median(v);
    return out;
}

bool non_decreasing(const Medians& m, const std::string& scheme, const std::vector<double>& axis) {
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (m.at({scheme, axis[i]}) < m.at({scheme, axis[i - 1]})) return false;
    return true;
}

int overhead_mismatches(const std::vector<harness::RunRecord>& records, int N_fixed) {
    int bad = 0;
    for (const auto& r : records) {
        const int N = N_fixed > 0 ? N_fixed : static_cast<int>(r.axis_value);
        long expected = 0;
        if (r.scheme == "noma" || r.scheme == "tdma_single") expected = N;
        else expected = static_cast<long>(r.L) * N;
        if (r.overhead != expected) ++bad;
    }
    return bad;
}

Outcome trends() {
    const auto t0 = std::chrono::steady_clock::now();
    int errors = 0, overhead_bad = 0;
    std::string detail;
    bool ok = true;

    harness::SweepConfig base;
    base.seeds = 20;
    base.record_timing = false;

    // (a) number of devices
    harness::SweepConfig a = base;
    a.base.N = 10;
    a.axis = "K";
    a.values = {2, 4, 6, 8, 10};
    a.schemes = {harness::SchemeKind::tdma, harness::SchemeKind::noma};
    const auto ra = harness::run_sweep(a);
    const Medians ma = medians(ra, &errors);
    overhead_bad += overhead_mismatches(ra, 10);
    const double tdma_gain = ma.at({"tdma", 8}) / ma.at({"tdma", 4}) - 1.0;
    const double noma_gain = ma.at({"noma", 8}) / ma.at({"noma", 4}) - 1.0;
    const bool pass_a = non_decreasing(ma, "tdma", a.values) && noma_gain < tdma_gain;
    ok = ok && pass_a;
    detail += fmt("(a) %s tdma K=2..10 %.4f..%.4f, gain K4->8 tdma %+.2f%% noma %+.2f%%; ", pass_a ? "ok" : "FAIL",
                  ma.at({"tdma", 2}), ma.at({"tdma", 10}), 100 * tdma_gain, 100 * noma_gain);

    // (b), (c) number of elements
    harness::SweepConfig b = base;
    b.base.set_device_count(4);
    b.axis = "N";
    b.values = {10, 20, 30};
    b.schemes = {harness::SchemeKind::tdma, harness::SchemeKind::noma, harness::SchemeKind::hybrid,
                 harness::SchemeKind::passive};
    b.L_values = {2};
    const auto rb = harness::run_sweep(b);
    const Medians mb = medians(rb, &errors);
    overhead_bad += overhead_mismatches(rb, 0);
    bool pass_b = true, pass_c = true;
    for (const char* s : {"tdma", "noma", "hybrid", "passive_simplified"}) pass_b = pass_b && non_decreasing(mb, s, b.values);
    for (double n : b.values)
        for (const char* s : {"tdma", "noma", "hybrid"})
            pass_c = pass_c && mb.at({s, n}) > mb.at({"passive_simplified", n});
    ok = ok && pass_b && pass_c;
    detail += fmt("(b) %s tdma N=10..30 %.4f..%.4f; (c) %s passive %.4f..%.4f; ", pass_b ? "ok" : "FAIL",
                  mb.at({"tdma", 10}), mb.at({"tdma", 30}), pass_c ? "ok" : "FAIL",
                  mb.at({"passive_simplified", 10}), mb.at({"passive_simplified", 30}));

    // (d) number of groups
    harness::SweepConfig d = base;
    d.base.set_device_count(6);
    d.base.N = 10;
    d.axis = "L";
    d.values = {1, 2, 3, 6};
    d.schemes = {harness::SchemeKind::hybrid};
    const auto rd = harness::run_sweep(d);
    const Medians md = medians(rd, &errors);
    overhead_bad += overhead_mismatches(rd, 10);
    const bool pass_d = non_decreasing(md, "hybrid", d.values);
    ok = ok && pass_d;
    detail += fmt("(d) %s hybrid L=1,2,3,6 %.4f %.4f %.4f %.4f; ", pass_d ? "ok" : "FAIL", md.at({"hybrid", 1}),
                  md.at({"hybrid", 2}), md.at({"hybrid", 3}), md.at({"hybrid", 6}));

    // (e) overhead column
    const bool pass_e = overhead_bad == 0;
    ok = ok && pass_e && errors == 0;
    detail += fmt("(e) %s %d overhead mismatches; %d solver errors; %.0f s", pass_e ? "ok" : "FAIL", overhead_bad,
                  errors, seconds_since(t0));
    return {ok, detail};
}

Outcome determinism() {
    auto verify_csv = [](int workers) {
        std::ostringstream os;
        harness::write_verify_csv(os, harness::run_verify(5, workers));
        return os.str();
    };
    harness::SweepConfig cfg;
    cfg.base = test::small_scenario(3, 3);
    cfg.axis = "P_r_dbm";
    cfg.values = {-10, 0};
    cfg.seeds = 3;
    cfg.schemes = {harness::SchemeKind::tdma, harness::SchemeKind::tdma_single, harness::SchemeKind::noma,
                   harness::SchemeKind::hybrid, harness::SchemeKind::passive};
    cfg.L_values = {2};
    cfg.record_timing = false;
    auto sweep_csv = [&](int workers) {
        cfg.workers = workers;
        std::ostringstream os;
        harness::write_records_csv(os, harness::run_sweep(cfg));
        return os.str();
    };
    const std::string v1 = verify_csv(1), v1b = verify_csv(1), v4 = verify_csv(4);
    const std::string s1 = sweep_csv(1), s1b = sweep_csv(1), s4 = sweep_csv(4);
    const bool verify_ok = v1 == v1b && v1 == v4;
    const bool sweep_ok = s1 == s1b && s1 == s4;
    return {verify_ok && sweep_ok, fmt("verify CSV %s, sweep CSV %s across reruns and workers {1, 4}",
                                       verify_ok ? "identical" : "DIFFERS", sweep_ok ? "identical" : "DIFFERS")};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"energy depletion (TDMA)", energy_depletion},
        {"full duration (NOMA)", full_duration},
        {"NOMA vs shared-beam TDMA", shared_beam_ordering},
        {"conditional TDMA vs NOMA", conditional_ordering},
        {"grid oracle", grid_oracle},
        {"rank-one rate", rank_one_rate},
        {"monotone traces", monotone_traces},
        {"equal-SNR allocation", equal_snr_oracle},
        {"trends", trends},
        {"determinism", determinism},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2d %-26s %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
