// SPDX-License-Identifier: Apache-2.0
#include "airs/tdma.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "airs/barrier.hpp"
#include "airs/counter_rng.hpp"
#include "airs/hybrid.hpp"
#include "tdma_internal.hpp"

namespace airs::tdma {

double ScaBound::eval(const BeamVector& v, double S) const {
    return constant + re_coef.dot(v.real()) + im_coef.dot(v.imag()) + s_coef * S;
}

ScaBound sca_bound(const BeamVector& v_ref, double S_ref, int k, const ChannelSet& ch, double energy) {
    if (!(S_ref > 0.0)) throw std::domain_error("sca_bound: expansion point needs S_ref > 0");
    const cdouble c0 = cascaded(v_ref, k, ch);
    // |c|^2/S >= (2/S0) Re(conj(c0) c) - |c0|^2 S / S0^2, with c = h_d + sum conj(v_n) q_n
    const double w = 2.0 * energy / S_ref;
    const VectorXcd a = std::conj(c0) * ch.q[k];
    ScaBound b;
    b.constant = w * (std::conj(c0) * ch.h_d[k]).real();
    b.re_coef = w * a.real();
    b.im_coef = w * a.imag();
    b.s_coef = -energy * std::norm(c0) / (S_ref * S_ref);
    return b;
}

namespace {

double noise_power(const BeamVector& v, const ChannelSet& ch, double sigma2, double sigma_r2) {
    return sigma2 + sigma_r2 * v.cwiseAbs2().dot(ch.G_diag);
}

double slot_rate(double tau, double snr_energy) {
    return tau > 0.0 ? tau * std::log2(1.0 + snr_energy / tau) : 0.0;
}

/// Variable layout helpers for a block of beam coefficients starting at `base`.
void add_beam_noise(convex::BarrierConstraint& c, int base, int N, const ChannelSet& ch, double sigma_r2) {
    if (sigma_r2 <= 0.0) return;
    for (int n = 0; n < N; ++n) {
        const double w = sigma_r2 * ch.G_diag[n];
        c.quadratic.push_back({base + n, base + n, w});
        c.quadratic.push_back({base + N + n, base + N + n, w});
    }
}

/// noise(v) - f_lb(v, S) <= 0 with v at [base, base + 2N) and S at s_index.
convex::BarrierConstraint surrogate_constraint(const ScaBound& b, int base, int s_index, int N,
                                               const ChannelSet& ch, double sigma2, double sigma_r2) {
    convex::BarrierConstraint c;
    add_beam_noise(c, base, N, ch, sigma_r2);
    c.affine.constant = sigma2 - b.constant;
    for (int n = 0; n < N; ++n) {
        c.affine.terms.emplace_back(base + n, -b.re_coef[n]);
        c.affine.terms.emplace_back(base + N + n, -b.im_coef[n]);
    }
    c.affine.terms.emplace_back(s_index, -b.s_coef);
    return c;
}

BeamVector read_beam(const VectorXd& x, int base, int N) {
    BeamVector v(N);
    for (int n = 0; n < N; ++n) v[n] = {x[base + n], x[base + N + n]};
    return v;
}

void write_beam(VectorXd& x, int base, const BeamVector& v) {
    const auto N = static_cast<int>(v.size());
    for (int n = 0; n < N; ++n) {
        x[base + n] = v[n].real();
        x[base + N + n] = v[n].imag();
    }
}

void finish(TdmaSolution& sol, const ChannelSet& ch, const Scenario& sc) {
    const int K = ch.K();
    const double sigma_r2 = sol.passive ? 0.0 : sc.sigma_r2;
    sol.S.assign(K, 0.0);
    double total = 0.0;
    sol.residual = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        total += sol.tau[k];
        const double noise = noise_power(sol.v[k], ch, sc.sigma2, sigma_r2);
        sol.S[k] = sol.tau[k] * sol.p[k] * std::norm(cascaded(sol.v[k], k, ch)) / noise;
        if (!sol.passive)
            sol.residual = std::max(sol.residual, amplification_power(sol.v[k], {k}, {sol.p[k]}, ch, sigma_r2) - sc.P_r);
    }
    sol.residual = std::max(sol.residual, total - sc.T_max);
    sol.objective = tdma_throughput(sol, ch, sc);
}

/// The start of each SCA subproblem is the previous iterate, so the barrier
/// path can begin where m/t is about 1% of the current objective.
SolverOptions warm_options(const SolverOptions& opts, const convex::BarrierProblem& prob, double current) {
    SolverOptions o = opts;
    if (current > 0.0)
        o.barrier_t0 = std::max(opts.barrier_t0, static_cast<double>(prob.constraints.size()) / (1e-2 * current));
    return o;
}

/// Unit-modulus pattern for device k: phase-aligned or seeded random phases.
BeamVector start_pattern(int k, int restart, const ChannelSet& ch, const SolverOptions& opts) {
    if (restart == 0) return phase_aligned(k, ch);
    CounterRng rng(CounterRng::derive(opts.seed, {0x7d3a, static_cast<std::uint64_t>(restart),
                                                  static_cast<std::uint64_t>(k)}));
    BeamVector v(ch.N());
    for (int n = 0; n < ch.N(); ++n) v[n] = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    return v;
}

} // namespace

namespace detail {

TdmaSolution run_sca(const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts,
                     std::vector<BeamVector> v, bool passive) {
    const int K = ch.K(), N = ch.N();
    const double T = sc.T_max;
    const double floor = opts.time_floor_ratio * T;
    const double sigma_r2 = passive ? 0.0 : sc.sigma_r2;
    const int nv = 2 * K + 2 * K * N;
    auto tau_i = [](int k) { return k; };
    auto s_i = [K](int k) { return K + k; };
    auto beam_i = [K, N](int k) { return 2 * K + 2 * N * k; };

    TdmaSolution sol;
    sol.passive = passive;
    std::vector<double> tau(K, T / K * (1.0 - 1e-3));
    auto true_S = [&](int k, const BeamVector& vk) {
        return sc.E[k] * std::norm(cascaded(vk, k, ch)) / noise_power(vk, ch, sc.sigma2, sigma_r2);
    };
    auto throughput = [&](const std::vector<double>& t, const std::vector<BeamVector>& beams) {
        double r = 0.0;
        for (int k = 0; k < K; ++k) r += slot_rate(t[k], true_S(k, beams[k]));
        return r;
    };

    double current = throughput(tau, v);
    for (int it = 0; it < opts.sca_max_iter; ++it) {
        convex::BarrierProblem prob;
        prob.num_vars = nv;
        VectorXd x0(nv);
        convex::AffineExpr total{{}, -T};
        for (int k = 0; k < K; ++k) {
            const double S_ref = true_S(k, v[k]);
            prob.terms.push_back({1.0, {{{tau_i(k), 1.0}}, 0.0}, {{{s_i(k), 1.0}}, 0.0}});
            prob.constraints.push_back(
                surrogate_constraint(sca_bound(v[k], S_ref, k, ch, sc.E[k]), beam_i(k), s_i(k), N, ch, sc.sigma2, sigma_r2));
            if (passive) {
                for (int n = 0; n < N; ++n) {
                    convex::BarrierConstraint unit;
                    unit.quadratic = {{beam_i(k) + n, beam_i(k) + n, 1.0}, {beam_i(k) + N + n, beam_i(k) + N + n, 1.0}};
                    unit.affine.constant = -1.0;
                    prob.constraints.push_back(std::move(unit));
                }
            } else {
                convex::BarrierConstraint amp;
                amp.time_index = tau_i(k);
                for (int n = 0; n < N; ++n) {
                    const double w = sc.E[k] * ch.Hr_diag[k][n];
                    amp.over_time.push_back({beam_i(k) + n, beam_i(k) + n, w});
                    amp.over_time.push_back({beam_i(k) + N + n, beam_i(k) + N + n, w});
                }
                for (int n = 0; n < N; ++n) {
                    amp.quadratic.push_back({beam_i(k) + n, beam_i(k) + n, sigma_r2});
                    amp.quadratic.push_back({beam_i(k) + N + n, beam_i(k) + N + n, sigma_r2});
                }
                amp.affine.constant = -sc.P_r;
                prob.constraints.push_back(std::move(amp));
            }
            prob.constraints.push_back({-1, {}, {}, {{{tau_i(k), -1.0}}, floor}});
            prob.constraints.push_back({-1, {}, {}, {{{s_i(k), -1.0}}, 0.0}});
            total.terms.emplace_back(tau_i(k), 1.0);

            x0[tau_i(k)] = tau[k];
            x0[s_i(k)] = S_ref * (1.0 - 1e-3);
            write_beam(x0, beam_i(k), v[k]);
        }
        prob.constraints.push_back({-1, {}, {}, total});

        const convex::BarrierResult r = convex::solve_barrier(prob, x0, warm_options(opts, prob, current));
        if (r.status == SolveStatus::infeasible_start) {
            sol.status = r.status;
            break;
        }
        std::vector<double> next_tau(K);
        std::vector<BeamVector> next_v(K);
        for (int k = 0; k < K; ++k) {
            next_tau[k] = r.x[tau_i(k)];
            next_v[k] = read_beam(r.x, beam_i(k), N);
        }
        const double next = throughput(next_tau, next_v);
        sol.iterations = it + 1;
        if (r.status != SolveStatus::optimal) sol.status = r.status;
        if (!(next >= current)) break;  // surrogate gave no ascent
        const double gain = next - current;
        tau = std::move(next_tau);
        v = std::move(next_v);
        current = next;
        sol.trace.push_back(current);
        if (gain <= opts.sca_tol * std::abs(current)) break;
    }
    if (sol.trace.empty()) sol.trace.push_back(current);

    sol.tau = tau;
    sol.v = v;
    sol.p.resize(K);
    for (int k = 0; k < K; ++k) sol.p[k] = sc.E[k] / tau[k];
    finish(sol, ch, sc);
    return sol;
}

} // namespace detail

TdmaSolution solve_tdma(const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts) {
    sc.validate();
    opts.validate();
    if (ch.K() != sc.K || ch.N() != sc.N) throw std::invalid_argument("solve_tdma: channel set does not match scenario");
    const int K = ch.K();
    TdmaSolution best;
    bool have = false;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        std::vector<BeamVector> v0(K);
        for (int k = 0; k < K; ++k) {
            const BeamVector u = start_pattern(k, r, ch, opts);
            // half the amplification budget at p_k = E_k K / T
            const double p = sc.E[k] * K / sc.T_max;
            const double rho = 0.5 * sc.P_r / (p * ch.Hr_diag[k].sum() + sc.sigma_r2 * ch.N());
            const double s = scale_search(
                [&](double a) { return snr(BeamVector(a * u), k, 1.0, ch, sc.sigma2, sc.sigma_r2); }, std::sqrt(rho));
            v0[k] = s * u;
        }
        TdmaSolution s = detail::run_sca(ch, sc, opts, std::move(v0), false);
        if (!have || s.objective > best.objective) {
            best = std::move(s);
            have = true;
        }
    }
    return best;
}

TdmaSolution solve_tdma_single_beam(const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts) {
    sc.validate();
    opts.validate();
    if (ch.K() != sc.K || ch.N() != sc.N)
        throw std::invalid_argument("solve_tdma_single_beam: channel set does not match scenario");
    const int K = ch.K(), N = ch.N();
    const double T = sc.T_max;

    hybrid::Grouping singles;
    singles.L = K;
    for (int k = 0; k < K; ++k) singles.groups.push_back({k});

    int lead = 0;
    double p_max_gain = 0.0, best = -1.0;
    for (int k = 0; k < K; ++k) {
        const double g = sc.E[k] * std::pow(std::abs(ch.h_d[k]) + ch.q[k].cwiseAbs().sum(), 2);
        if (g > best) {
            best = g;
            lead = k;
        }
        p_max_gain = std::max(p_max_gain, sc.E[k] * K / T * ch.Hr_diag[k].sum());
    }
    auto rate = [&](const std::vector<double>& tau, const std::vector<double>& e, const BeamVector& beam) {
        const double noise = noise_power(beam, ch, sc.sigma2, sc.sigma_r2);
        double r = 0.0;
        for (int k = 0; k < K; ++k) r += slot_rate(tau[k], e[k] * std::norm(cascaded(beam, k, ch)) / noise);
        return r;
    };

    const BeamVector dir = phase_aligned(lead, ch);
    BeamVector v;
    {
        const std::vector<double> equal_tau(K, T / K);
        const double s = scale_search([&](double a) { return rate(equal_tau, sc.E, BeamVector(a * dir)); },
                                      std::sqrt(0.5 * sc.P_r / (p_max_gain + sc.sigma_r2 * N)));
        v = s * dir;
    }

    TdmaSolution sol;
    sol.shared_beam = true;
    hybrid::TimeEnergy te;
    double prev = -1.0;
    for (int it = 0; it < opts.ao_max_iter; ++it) {
        hybrid::TimeEnergy next = hybrid::time_energy_step(std::vector<BeamVector>(K, v), singles, ch, sc, opts);
        if (next.status != SolveStatus::optimal) sol.status = next.status;
        if (it == 0 || rate(next.tau, next.e, v) >= prev) te = std::move(next);
        double current = rate(te.tau, te.e, v);

        // beam step: SCA over the shared v with (tau, e) fixed
        std::vector<int> active;
        for (int k = 0; k < K; ++k)
            if (te.tau[k] > 0.0 && te.e[k] > 0.0) active.push_back(k);
        const int A = static_cast<int>(active.size());
        const int base = A;
        for (int inner = 0; inner < opts.inner_sca_max_iter && A > 0; ++inner) {
            convex::BarrierProblem prob;
            prob.num_vars = A + 2 * N;
            VectorXd x0(prob.num_vars);
            write_beam(x0, base, v);
            const double noise = noise_power(v, ch, sc.sigma2, sc.sigma_r2);
            for (int i = 0; i < A; ++i) {
                const int k = active[i];
                const double S_ref = te.e[k] * std::norm(cascaded(v, k, ch)) / noise;
                prob.terms.push_back({1.0, {{}, te.tau[k]}, {{{i, 1.0}}, 0.0}});
                prob.constraints.push_back(
                    surrogate_constraint(sca_bound(v, S_ref, k, ch, te.e[k]), base, i, N, ch, sc.sigma2, sc.sigma_r2));
                prob.constraints.push_back({-1, {}, {}, {{{i, -1.0}}, 0.0}});
                convex::BarrierConstraint amp;
                const double pk = te.e[k] / te.tau[k];
                for (int n = 0; n < N; ++n) {
                    const double w = pk * ch.Hr_diag[k][n] + sc.sigma_r2;
                    amp.quadratic.push_back({base + n, base + n, w});
                    amp.quadratic.push_back({base + N + n, base + N + n, w});
                }
                amp.affine.constant = -sc.P_r;
                prob.constraints.push_back(std::move(amp));
                x0[i] = S_ref * (1.0 - 1e-3);
            }
            const convex::BarrierResult r = convex::solve_barrier(prob, x0, warm_options(opts, prob, current));
            if (r.status == SolveStatus::infeasible_start) break;
            if (r.status != SolveStatus::optimal) sol.status = r.status;
            const BeamVector cand = read_beam(r.x, base, N);
            const double val = rate(te.tau, te.e, cand);
            if (!(val >= current)) break;
            const double gain = val - current;
            v = cand;
            current = val;
            if (gain <= opts.sca_tol * std::abs(current)) break;
        }

        sol.trace.push_back(current);
        sol.iterations = it + 1;
        if (prev >= 0.0 && current - prev <= opts.ao_tol * std::abs(prev)) break;
        prev = current;
    }

    sol.tau = te.tau;
    sol.v.assign(K, v);
    sol.p.assign(K, 0.0);
    for (int k = 0; k < K; ++k)
        if (sol.tau[k] > 0.0) sol.p[k] = te.e[k] / sol.tau[k];
    finish(sol, ch, sc);
    return sol;
}

double tdma_throughput(const TdmaSolution& sol, const ChannelSet& ch, const Scenario& sc) {
    const double sigma_r2 = sol.passive ? 0.0 : sc.sigma_r2;
    double r = 0.0;
    for (int k = 0; k < ch.K(); ++k) {
        const double noise = noise_power(sol.v[k], ch, sc.sigma2, sigma_r2);
        if (sol.tau[k] > 0.0) r += sol.tau[k] * std::log2(1.0 + sol.p[k] * std::norm(cascaded(sol.v[k], k, ch)) / noise);
    }
    return r;
}

void write_solution_csv(std::ostream& os, const TdmaSolution& sol) {
    const auto old = os.precision(17);
    os << "k,tau,p,S\n";
    for (std::size_t k = 0; k < sol.tau.size(); ++k)
        os << k << ',' << sol.tau[k] << ',' << sol.p[k] << ',' << sol.S[k] << '\n';
    os.precision(old);
}

void write_beams_csv(std::ostream& os, const std::vector<BeamVector>& beams) {
    const auto old = os.precision(17);
    os << "slot,n,re,im\n";
    for (std::size_t l = 0; l < beams.size(); ++l)
        for (Eigen::Index n = 0; n < beams[l].size(); ++n)
            os << l << ',' << n << ',' << beams[l][n].real() << ',' << beams[l][n].imag() << '\n';
    os.precision(old);
}

} // namespace airs::tdma
