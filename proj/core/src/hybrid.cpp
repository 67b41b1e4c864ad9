// SPDX-License-Identifier: Apache-2.0
#include "airs/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "airs/barrier.hpp"
#include "airs/counter_rng.hpp"

namespace airs::hybrid {

int Grouping::K() const {
    int k = 0;
    for (const auto& g : groups) k += static_cast<int>(g.size());
    return k;
}

void Grouping::validate(int K) const {
    if (L < 1 || static_cast<int>(groups.size()) != L) throw std::invalid_argument("Grouping: L does not match group count");
    std::vector<int> seen(static_cast<std::size_t>(std::max(K, 0)), 0);
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("Grouping: empty group");
        for (int k : g) {
            if (k < 0 || k >= K) throw std::invalid_argument("Grouping: device index out of range");
            if (seen[k]++) throw std::invalid_argument("Grouping: device appears in two groups");
        }
    }
    if (this->K() != K) throw std::invalid_argument("Grouping: groups do not cover every device");
}

std::string Grouping::to_string() const {
    std::ostringstream os;
    for (std::size_t l = 0; l < groups.size(); ++l) {
        if (l) os << '|';
        for (std::size_t i = 0; i < groups[l].size(); ++i) os << (i ? " " : "") << groups[l][i];
    }
    return os.str();
}

Grouping Grouping::parse(const std::string& text) {
    Grouping g;
    std::istringstream groups(text);
    std::string part;
    while (std::getline(groups, part, '|')) {
        std::istringstream items(part);
        std::vector<int> members;
        int k;
        while (items >> k) members.push_back(k);
        if (!items.eof()) throw std::invalid_argument("Grouping::parse: bad token in '" + text + "'");
        g.groups.push_back(std::move(members));
    }
    g.L = static_cast<int>(g.groups.size());
    return g;
}

GroupingStrategy parse_strategy(const std::string& name) {
    if (name == "round_robin") return GroupingStrategy::round_robin;
    if (name == "random") return GroupingStrategy::random;
    if (name == "exhaust_best") return GroupingStrategy::exhaust_best;
    if (name == "exhaust_worst") return GroupingStrategy::exhaust_worst;
    throw std::invalid_argument("unknown grouping strategy '" + name + "'");
}

const char* to_string(GroupingStrategy s) {
    switch (s) {
    case GroupingStrategy::round_robin: return "round_robin";
    case GroupingStrategy::random: return "random";
    case GroupingStrategy::exhaust_best: return "exhaust_best";
    case GroupingStrategy::exhaust_worst: return "exhaust_worst";
    }
    return "?";
}

namespace {

void check_sizes(int K, int L) {
    if (K < 1 || L < 1 || L > K) throw std::invalid_argument("partition_devices: need 1 <= L <= K");
}

Grouping deal(const std::vector<int>& order, int L) {
    Grouping g;
    g.L = L;
    g.groups.assign(L, {});
    for (std::size_t i = 0; i < order.size(); ++i) g.groups[i % L].push_back(order[i]);
    for (auto& grp : g.groups) std::sort(grp.begin(), grp.end());
    return g;
}

double aligned_gain(int k, const ChannelSet& ch) {
    return std::pow(std::abs(ch.h_d[k]) + ch.q[k].cwiseAbs().sum(), 2);
}

} // namespace

Grouping partition_devices(int K, int L, GroupingStrategy strategy, std::uint64_t seed) {
    check_sizes(K, L);
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    switch (strategy) {
    case GroupingStrategy::round_robin: break;
    case GroupingStrategy::random: {
        CounterRng rng(CounterRng::derive(seed, {0x6709}));
        for (int i = K - 1; i > 0; --i) {
            const auto j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[i], order[j]);
        }
        break;
    }
    default: throw std::invalid_argument("partition_devices: exhaustive grouping needs channel data");
    }
    return deal(order, L);
}

std::vector<Grouping> balanced_partitions(int K, int L) {
    check_sizes(K, L);
    const int big = (K + L - 1) / L, small = K / L;
    const int n_big = K % L == 0 ? L : K % L;
    std::vector<Grouping> out;
    std::vector<std::vector<int>> current;
    std::vector<bool> used(K, false);

    // the group holding the smallest free device is chosen next, so each
    // unordered partition is produced exactly once
    std::function<void(int, int)> rec = [&](int bigs_left, int smalls_left) {
        int first = 0;
        while (first < K && used[first]) ++first;
        if (first == K) {
            Grouping g;
            g.L = L;
            g.groups = current;
            out.push_back(std::move(g));
            return;
        }
        std::vector<int> free;
        for (int k = first + 1; k < K; ++k)
            if (!used[k]) free.push_back(k);
        auto try_size = [&](int size, int b, int s) {
            const int pick = size - 1;
            if (pick > static_cast<int>(free.size())) return;
            std::vector<int> idx(pick);
            std::iota(idx.begin(), idx.end(), 0);
            while (true) {
                std::vector<int> grp{first};
                for (int i : idx) grp.push_back(free[i]);
                for (int k : grp) used[k] = true;
                current.push_back(grp);
                rec(b, s);
                current.pop_back();
                for (int k : grp) used[k] = false;
                // next combination
                int i = pick - 1;
                while (i >= 0 && idx[i] == static_cast<int>(free.size()) - pick + i) --i;
                if (i < 0) break;
                ++idx[i];
                for (int j = i + 1; j < pick; ++j) idx[j] = idx[j - 1] + 1;
            }
        };
        if (bigs_left > 0) try_size(big, bigs_left - 1, smalls_left);
        if (small != big && smalls_left > 0) try_size(small, bigs_left, smalls_left - 1);
    };
    rec(n_big, small == big ? 0 : L - n_big);
    return out;
}

Grouping partition_devices(const ChannelSet& ch, const Scenario& sc, int L, GroupingStrategy strategy,
                           std::uint64_t seed, const SolverOptions& opts) {
    const int K = ch.K();
    if (strategy != GroupingStrategy::exhaust_best && strategy != GroupingStrategy::exhaust_worst)
        return partition_devices(K, L, strategy, seed);
    check_sizes(K, L);
    if (K > 8) throw std::invalid_argument("partition_devices: exhaustive grouping is limited to K <= 8");
    const bool best = strategy == GroupingStrategy::exhaust_best;
    Grouping chosen;
    double chosen_value = 0.0;
    bool first = true;
    for (const auto& g : balanced_partitions(K, L)) {
        const double val = solve_hybrid(ch, sc, g, opts).objective;
        if (first || (best ? val > chosen_value : val < chosen_value)) {
            chosen = g;
            chosen_value = val;
            first = false;
        }
    }
    return chosen;
}

TimeEnergy time_energy_step(const std::vector<BeamVector>& v, const Grouping& grouping, const ChannelSet& ch,
                            const Scenario& sc, const SolverOptions& opts, const TimeEnergy* start) {
    const int K = ch.K(), L = grouping.L;
    grouping.validate(K);
    if (static_cast<int>(v.size()) != L) throw std::invalid_argument("time_energy_step: need one beam per group");
    const double floor = opts.time_floor_ratio * sc.T_max;

    convex::BarrierProblem prob;
    prob.num_vars = L + K;
    auto e_index = [L](int k) { return L + k; };
    std::vector<double> margin(L);
    std::vector<double> gain(K), incident(K);

    convex::AffineExpr total_time{{}, -sc.T_max};
    for (int l = 0; l < L; ++l) {
        const BeamVector& vl = v[l];
        const double noise = sc.sigma2 + sc.sigma_r2 * vl.cwiseAbs2().dot(ch.G_diag);
        margin[l] = sc.P_r - sc.sigma_r2 * vl.squaredNorm();
        if (!(margin[l] > 0.0))
            throw SolverError(SolveStatus::infeasible_start, "time_energy_step: beam leaves no amplification budget");

        convex::PerspectiveTerm term;
        term.tau.terms = {{l, 1.0}};
        convex::BarrierConstraint amp;
        for (int k : grouping.groups[l]) {
            gain[k] = std::norm(cascaded(vl, k, ch));
            incident[k] = incident_power_gain(vl, k, ch);
            term.snr.terms.emplace_back(e_index(k), gain[k] / noise);
            if (incident[k] > 0.0) amp.affine.terms.emplace_back(e_index(k), incident[k]);
        }
        prob.terms.push_back(std::move(term));
        amp.affine.terms.emplace_back(l, -margin[l]);
        prob.constraints.push_back(std::move(amp));
        prob.constraints.push_back({-1, {}, {}, {{{l, -1.0}}, floor}});
        total_time.terms.emplace_back(l, 1.0);
    }
    for (int k = 0; k < K; ++k) {
        prob.constraints.push_back({-1, {}, {}, {{{e_index(k), 1.0}}, -sc.E[k]}});
        prob.constraints.push_back({-1, {}, {}, {{{e_index(k), -1.0}}, 0.0}});
    }
    prob.constraints.push_back({-1, {}, {}, total_time});

    VectorXd x0(L + K);
    bool have_start = false;
    if (start && static_cast<int>(start->tau.size()) == L && static_cast<int>(start->e.size()) == K) {
        for (int l = 0; l < L; ++l) x0[l] = start->tau[l];
        for (int k = 0; k < K; ++k) x0[e_index(k)] = start->e[k];
        have_start = prob.max_violation(x0) < 0.0;
    }
    if (!have_start) {
        for (int l = 0; l < L; ++l) {
            const double tau = 0.99 * sc.T_max / L;
            x0[l] = tau;
            const double share = static_cast<double>(grouping.groups[l].size());
            for (int k : grouping.groups[l]) {
                double e = sc.E[k];
                if (incident[k] > 0.0) e = std::min(e, margin[l] * tau / (share * incident[k]));
                x0[e_index(k)] = 0.5 * e;
            }
        }
    }

    const convex::BarrierResult r = convex::solve_barrier(prob, x0, opts);
    TimeEnergy out;
    out.status = r.status;
    out.tau.assign(r.x.data(), r.x.data() + L);
    out.e.assign(r.x.data() + L, r.x.data() + L + K);
    for (int l = 0; l < L; ++l) {
        if (out.tau[l] < 10.0 * floor) {
            out.tau[l] = 0.0;
            for (int k : grouping.groups[l]) out.e[k] = 0.0;
        }
    }
    VectorXd xs(L + K);
    for (int l = 0; l < L; ++l) xs[l] = out.tau[l];
    for (int k = 0; k < K; ++k) xs[e_index(k)] = out.e[k];
    out.objective = prob.objective(xs);
    return out;
}

noma::BeamResult group_beamforming_step(const TimeEnergy& te, int l, const Grouping& grouping,
                                        const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts) {
    const auto& members = grouping.groups.at(static_cast<std::size_t>(l));
    const double floor = opts.time_floor_ratio * sc.T_max;
    if (!(te.tau[l] > floor)) {
        noma::BeamResult skipped;
        skipped.v = BeamVector::Zero(ch.N());
        skipped.status = SolveStatus::infeasible;
        return skipped;
    }
    std::vector<double> p;
    for (int k : members) p.push_back(te.e[k] / te.tau[l]);
    return noma::beamforming_step(p, ch.select(members), sc, opts);
}

double hybrid_throughput(const HybridSolution& sol, const ChannelSet& ch, const Scenario& sc) {
    double total = 0.0;
    for (int l = 0; l < sol.grouping.L; ++l) {
        const double tau = sol.tau[l];
        if (!(tau > 0.0)) continue;
        const BeamVector& v = sol.v[l];
        const double noise = sc.sigma2 + sc.sigma_r2 * v.cwiseAbs2().dot(ch.G_diag);
        double s = 0.0;
        for (int k : sol.grouping.groups[l]) s += sol.e[k] * std::norm(cascaded(v, k, ch));
        total += tau * std::log2(1.0 + s / (tau * noise));
    }
    return total;
}

long signaling_overhead(const Grouping& grouping, int N) {
    return static_cast<long>(grouping.L) * N;
}

namespace {

double group_sinr(const BeamVector& v, const std::vector<double>& p, const std::vector<int>& members,
                  const ChannelSet& ch, const Scenario& sc) {
    double num = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) num += p[i] * std::norm(cascaded(v, members[i], ch));
    return num / (sc.sigma2 + sc.sigma_r2 * v.cwiseAbs2().dot(ch.G_diag));
}

} // namespace

HybridSolution solve_hybrid(const ChannelSet& ch, const Scenario& sc, const Grouping& grouping,
                            const SolverOptions& opts) {
    sc.validate();
    opts.validate();
    if (ch.K() != sc.K || ch.N() != sc.N) throw std::invalid_argument("solve_hybrid: channel set does not match scenario");
    const int K = ch.K(), L = grouping.L;
    grouping.validate(K);

    HybridSolution sol;
    sol.grouping = grouping;
    if (L == 1) {
        // one group is exactly the NOMA problem
        const noma::NomaSolution nm = noma::solve_noma(ch, sc, opts);
        sol.tau = {nm.tau};
        sol.p = nm.p;
        sol.e.resize(K);
        for (int k = 0; k < K; ++k) sol.e[k] = nm.p[k] * nm.tau;
        sol.v = {nm.v};
        sol.ao_trace = nm.ao_trace;
        sol.sdp_rank_exact = nm.sdp_rank_exact;
        sol.iterations = nm.iterations;
        sol.status = nm.status;
        sol.residual = nm.residual;
        sol.objective = hybrid_throughput(sol, ch, sc);
        return sol;
    }
    std::vector<BeamVector> v0(L);
    for (int l = 0; l < L; ++l) {
        const auto& members = grouping.groups[l];
        const int lead = *std::max_element(members.begin(), members.end(), [&](int a, int b) {
            return sc.E[a] * aligned_gain(a, ch) < sc.E[b] * aligned_gain(b, ch);
        });
        BeamVector v = phase_aligned(lead, ch);
        std::vector<double> p;
        for (int k : members) p.push_back(sc.E[k] * L / sc.T_max);
        const double a = amplification_power(v, members, p, ch, sc.sigma_r2);
        const double s = scale_search(
            [&](double x) {
                const BeamVector w = x * v;
                double sum = 0.0;
                for (std::size_t i = 0; i < members.size(); ++i)
                    sum += snr(w, members[i], p[i], ch, sc.sigma2, sc.sigma_r2);
                return sum;
            },
            std::sqrt(0.5 * sc.P_r / a));
        v0[l] = s * v;
    }

    // AO from fixed starting beams; every run begins from a fresh record
    auto run_ao = [&](std::vector<BeamVector> start) {
        HybridSolution run;
        run.grouping = grouping;
        run.v = std::move(start);
        TimeEnergy te;
        double prev = -1.0;
        for (int it = 0; it < opts.ao_max_iter; ++it) {
            TimeEnergy next = time_energy_step(run.v, grouping, ch, sc, opts);
            if (next.status != SolveStatus::optimal) run.status = next.status;
            run.tau = next.tau;
            run.e = next.e;
            const double candidate = hybrid_throughput(run, ch, sc);
            if (it == 0 || candidate >= prev) {
                te = std::move(next);
            } else {
                run.tau = te.tau;
                run.e = te.e;
            }

            auto step = [&](int l) { return group_beamforming_step(te, l, grouping, ch, sc, opts); };
            std::vector<noma::BeamResult> beams(L);
            const int workers = std::max(1, std::min(opts.group_workers, L));
            if (workers > 1) {
                // groups are independent given (tau, e)
                for (int base = 0; base < L; base += workers) {
                    std::vector<std::future<noma::BeamResult>> jobs;
                    for (int l = base; l < std::min(L, base + workers); ++l)
                        jobs.push_back(std::async(std::launch::async, step, l));
                    for (int l = base; l < std::min(L, base + workers); ++l) beams[l] = jobs[l - base].get();
                }
            } else {
                for (int l = 0; l < L; ++l) beams[l] = step(l);
            }
            for (int l = 0; l < L; ++l) {
                if (!(te.tau[l] > 0.0)) {
                    ++run.skipped_slots;
                    continue;
                }
                const auto& members = grouping.groups[l];
                std::vector<double> p;
                for (int k : members) p.push_back(te.e[k] / te.tau[l]);
                run.sdp_rank_exact = run.sdp_rank_exact && beams[l].rank_exact;
                if (beams[l].status != SolveStatus::optimal) run.status = beams[l].status;
                if (group_sinr(beams[l].v, p, members, ch, sc) > group_sinr(run.v[l], p, members, ch, sc))
                    run.v[l] = beams[l].v;
            }

            const double obj = hybrid_throughput(run, ch, sc);
            run.ao_trace.push_back(obj);
            run.iterations = it + 1;
            if (prev >= 0.0 && obj - prev <= opts.ao_tol * std::max(std::abs(prev), 1e-300)) {
                prev = obj;
                break;
            }
            prev = obj;
        }
        return run;
    };

    HybridSolution best = run_ao(v0);
    if (opts.device_starts) {
        // start group l from the beam that serves its j-th member alone
        std::size_t largest = 0;
        for (const auto& g : grouping.groups) largest = std::max(largest, g.size());
        for (std::size_t j = 0; j < largest; ++j) {
            std::vector<BeamVector> vs(L);
            bool ok = true;
            for (int l = 0; l < L && ok; ++l) {
                const auto& members = grouping.groups[l];
                const int m = members[j % members.size()];
                std::vector<double> solo(K, 0.0);
                solo[m] = sc.E[m] * L / sc.T_max;
                const noma::BeamResult b = noma::beamforming_step(solo, ch, sc, opts);
                ok = b.status == SolveStatus::optimal;
                vs[l] = b.v;
            }
            if (!ok) continue;
            HybridSolution alt = run_ao(std::move(vs));
            if (hybrid_throughput(alt, ch, sc) > hybrid_throughput(best, ch, sc)) best = std::move(alt);
        }
    }
    sol = std::move(best);

    sol.p.assign(K, 0.0);
    double total_time = 0.0;
    sol.residual = -sc.P_r;
    for (int l = 0; l < L; ++l) {
        total_time += sol.tau[l];
        if (!(sol.tau[l] > 0.0)) continue;
        std::vector<double> p;
        for (int k : grouping.groups[l]) {
            sol.p[k] = sol.e[k] / sol.tau[l];
            p.push_back(sol.p[k]);
        }
        sol.residual = std::max(sol.residual,
                                amplification_power(sol.v[l], grouping.groups[l], p, ch, sc.sigma_r2) - sc.P_r);
    }
    sol.residual = std::max(sol.residual, total_time - sc.T_max);
    sol.objective = hybrid_throughput(sol, ch, sc);
    return sol;
}

} // namespace airs::hybrid
