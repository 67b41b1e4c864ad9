// SPDX-License-Identifier: Apache-2.0
#include "airs/noma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "airs/knapsack.hpp"
#include "airs/tdma.hpp"

namespace airs::noma {

std::vector<double> power_step(const BeamVector& v, const ChannelSet& ch, const Scenario& sc) {
    if (v.size() != ch.N()) throw std::invalid_argument("power_step: beam vector length does not match N");
    const int K = ch.K();
    const double noise_amp = sc.sigma_r2 * v.squaredNorm();
    if (noise_amp > sc.P_r * (1.0 + 1e-12))
        throw SolverError(SolveStatus::infeasible, "power_step: amplified IRS noise alone exceeds P_r");
    convex::KnapsackLp lp;
    lp.c.resize(K);
    lp.a.resize(K);
    lp.u.resize(K);
    for (int k = 0; k < K; ++k) {
        lp.c[k] = std::norm(cascaded(v, k, ch));
        lp.a[k] = incident_power_gain(v, k, ch);
        lp.u[k] = sc.E[k] / sc.T_max;
    }
    lp.b = std::max(0.0, sc.P_r - noise_amp);
    const VectorXd p = convex::solve_knapsack(lp);
    return {p.data(), p.data() + K};
}

double noma_throughput(const NomaSolution& sol, const ChannelSet& ch, const Scenario& sc) {
    return sol.tau * std::log2(1.0 + sinr_sum(sol.v, sol.p, ch, sc));
}

namespace {

struct AoRun {
    BeamVector v;
    std::vector<double> p;
    double objective = -1.0;
    std::vector<double> trace;
    bool rank_exact = true;
    int iterations = 0;
    SolveStatus status = SolveStatus::optimal;
};

AoRun run_ao(BeamVector v, const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts) {
    AoRun run;
    const double T = sc.T_max;
    double prev = -1.0;
    for (int it = 0; it < opts.ao_max_iter; ++it) {
        run.p = power_step(v, ch, sc);
        double current = sinr_sum(v, run.p, ch, sc);
        const BeamResult beam = beamforming_step(run.p, ch, sc, opts);
        run.rank_exact = run.rank_exact && beam.rank_exact;
        if (beam.status != SolveStatus::optimal) run.status = beam.status;
        if (beam.sinr_sum > current) {
            v = beam.v;
            current = beam.sinr_sum;
        }
        const double obj = T * std::log2(1.0 + current);
        run.trace.push_back(obj);
        run.iterations = it + 1;
        run.objective = obj;
        if (prev >= 0.0 && obj - prev <= opts.ao_tol * std::max(std::abs(prev), 1e-300)) break;
        prev = obj;
    }
    run.v = std::move(v);
    return run;
}

} // namespace

NomaSolution solve_noma(const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts) {
    sc.validate();
    opts.validate();
    if (ch.K() != sc.K || ch.N() != sc.N) throw std::invalid_argument("solve_noma: channel set does not match scenario");
    const int K = ch.K();
    const double T = sc.T_max;
    std::vector<int> all(K);
    std::iota(all.begin(), all.end(), 0);

    // phase-align to the device with the strongest aligned gain; the amplitude is
    // capped where the amplification constraint is tight at full power
    int lead = 0;
    double best = -1.0;
    for (int k = 0; k < K; ++k) {
        const double g = sc.E[k] * std::pow(std::abs(ch.h_d[k]) + ch.q[k].cwiseAbs().sum(), 2);
        if (g > best) {
            best = g;
            lead = k;
        }
    }
    BeamVector v0 = phase_aligned(lead, ch);
    {
        std::vector<double> full(K);
        for (int k = 0; k < K; ++k) full[k] = sc.E[k] / T;
        const double s_max = std::sqrt(sc.P_r / amplification_power(v0, all, full, ch, sc.sigma_r2));
        const BeamVector dir = v0;
        v0 *= scale_search([&](double a) { return sinr_sum(BeamVector(a * dir), full, ch, sc); }, s_max);
    }
    AoRun run = run_ao(v0, ch, sc, opts);

    // The single-beam TDMA beam is feasible here and, by concavity of the rate,
    // yields at least the single-beam TDMA throughput. The AO alone can stall
    // at a coordinate-wise fixed point below it.
    if (opts.noma_single_beam_start && K > 1) {
        const tdma::TdmaSolution sb = tdma::solve_tdma_single_beam(ch, sc, opts);
        AoRun alt = run_ao(sb.v.front(), ch, sc, opts);
        if (alt.objective > run.objective) run = std::move(alt);
    }

    // The optimum may silence weak devices so the budget serves the others; AO
    // from full power does not find that, so also start from each device alone.
    if (opts.device_starts && K > 1) {
        for (int k = 0; k < K; ++k) {
            std::vector<double> solo(K, 0.0);
            solo[k] = sc.E[k] / T;
            const BeamResult b = beamforming_step(solo, ch, sc, opts);
            if (b.status != SolveStatus::optimal) continue;
            AoRun alt = run_ao(b.v, ch, sc, opts);
            if (alt.objective > run.objective) run = std::move(alt);
        }
    }

    NomaSolution sol;
    sol.tau = T;
    sol.v = run.v;
    sol.p = run.p;
    sol.ao_trace = run.trace;
    sol.sdp_rank_exact = run.rank_exact;
    sol.iterations = run.iterations;
    sol.status = run.status;
    sol.objective = noma_throughput(sol, ch, sc);
    sol.residual = amplification_power(sol.v, all, sol.p, ch, sc.sigma_r2) - sc.P_r;
    return sol;
}

} // namespace airs::noma
