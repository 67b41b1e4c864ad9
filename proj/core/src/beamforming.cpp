// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <stdexcept>

#include "airs/counter_rng.hpp"
#include "airs/noma.hpp"
#include "airs/rank_one.hpp"

namespace airs::noma {

namespace {

/// Per-element weight of the amplification power: sum_k p_k |h_r,k,n|^2 + sigma_r^2.
VectorXd amplification_weights(const std::vector<double>& p, const ChannelSet& ch, double sigma_r2) {
    VectorXd w = VectorXd::Constant(ch.N(), sigma_r2);
    for (int k = 0; k < ch.K(); ++k) w += p[k] * ch.Hr_diag[k];
    return w;
}

void check_powers(const std::vector<double>& p, const ChannelSet& ch) {
    if (static_cast<int>(p.size()) != ch.K()) throw std::invalid_argument("power vector length does not match K");
    for (double x : p)
        if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("powers must be finite and nonnegative");
}

} // namespace

convex::SdpProblem build_cc_sdp(const std::vector<double>& p, const ChannelSet& ch, const Scenario& sc) {
    check_powers(p, ch);
    const int N = ch.N();
    convex::SdpProblem prob;
    prob.sense = convex::Sense::maximize;
    prob.objective = MatrixXcd::Zero(N + 1, N + 1);
    VectorXcd qbar(N + 1);
    for (int k = 0; k < ch.K(); ++k) {
        if (p[k] == 0.0) continue;
        qbar.head(N) = ch.q[k];
        qbar[N] = ch.h_d[k];
        prob.objective += p[k] * qbar * qbar.adjoint();
    }
    prob.objective = 0.5 * (prob.objective + prob.objective.adjoint()).eval();

    VectorXd noise(N + 1);
    noise.head(N) = sc.sigma_r2 * ch.G_diag;
    noise[N] = sc.sigma2;
    prob.equalities.push_back({noise.cast<cdouble>().asDiagonal().toDenseMatrix(), 1.0});

    const VectorXd w = amplification_weights(p, ch, sc.sigma_r2);
    VectorXd amp(N + 1);
    amp.head(N) = w;
    amp[N] = -sc.P_r;
    prob.inequalities.push_back({amp.cast<cdouble>().asDiagonal().toDenseMatrix(), 0.0});

    // X(n,n) ~ |v_n|^2 t with t ~ 1/sigma^2 and w_n |v_n|^2 ~ P_r
    const double inv_sigma = 1.0 / std::sqrt(sc.sigma2);
    prob.scaling.resize(N + 1);
    for (int n = 0; n < N; ++n)
        prob.scaling[n] = w[n] > 0.0 ? std::sqrt(sc.P_r / w[n]) * inv_sigma : inv_sigma;
    prob.scaling[N] = inv_sigma;
    return prob;
}

double sinr_sum(const BeamVector& v, const std::vector<double>& p, const ChannelSet& ch, const Scenario& sc) {
    check_powers(p, ch);
    double num = 0.0;
    for (int k = 0; k < ch.K(); ++k)
        if (p[k] > 0.0) num += p[k] * std::norm(cascaded(v, k, ch));
    return num / (sc.sigma2 + sc.sigma_r2 * v.cwiseAbs2().dot(ch.G_diag));
}

BeamResult beamforming_step(const std::vector<double>& p, const ChannelSet& ch, const Scenario& sc,
                            const SolverOptions& opts) {
    check_powers(p, ch);
    const int N = ch.N();
    BeamResult out;
    bool any = false;
    for (double x : p) any = any || x > 0.0;
    if (!any) {
        out.v = BeamVector::Zero(N);
        return out;
    }

    const convex::SdpProblem prob = build_cc_sdp(p, ch, sc);
    const convex::SdpResult sdp = convex::solve_sdp(prob, opts);
    out.status = sdp.status;
    if (sdp.status == SolveStatus::infeasible)
        throw SolverError(sdp.status, "beamforming_step: relaxed beamforming problem reported infeasible");

    const VectorXd w = amplification_weights(p, ch, sc.sigma_r2);
    auto amp_power = [&](const BeamVector& v) { return v.cwiseAbs2().dot(w); };
    // drop the augmented entry after making it real positive; fit the budget
    auto recover = [&](const VectorXcd& vbar, bool fill_budget) -> BeamVector {
        const cdouble last = vbar[N];
        if (std::abs(last) <= 1e-300) return BeamVector::Zero(N);
        BeamVector v = vbar.head(N) / last;
        const double a = amp_power(v);
        if (a > sc.P_r || (fill_budget && a > 0.0)) v *= std::sqrt(sc.P_r / a);
        return v;
    };

    const convex::RankOne r1 = convex::extract_rank_one(sdp.X, opts);
    out.rank_exact = r1.exact;
    out.v = recover(r1.v, false);
    out.sinr_sum = sinr_sum(out.v, p, ch, sc);
    if (!r1.exact) {
        const auto key = CounterRng::derive(opts.seed, {0xbea3, static_cast<std::uint64_t>(N)});
        for (const auto& xi : convex::gaussian_samples(sdp.X, opts.randomization_samples, key)) {
            const BeamVector v = recover(xi, true);
            const double val = sinr_sum(v, p, ch, sc);
            if (val > out.sinr_sum) {
                out.v = v;
                out.sinr_sum = val;
                out.randomized = true;
            }
        }
    }
    return out;
}

} // namespace airs::noma
