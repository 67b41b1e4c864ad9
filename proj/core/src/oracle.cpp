// SPDX-License-Identifier: Apache-2.0
#include "airs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <thread>

#include "airs/sdp.hpp"

namespace airs::oracle {

namespace {

struct Slot {
    std::vector<int> members;
    bool depleting = false;  // p = E / tau with beam scaled to the budget
    bool full_time = false;  // tau fixed to T_max
};

std::vector<Slot> slots_for(const ChannelSet& ch, Scheme scheme, const hybrid::Grouping* grouping) {
    std::vector<Slot> slots;
    switch (scheme) {
    case Scheme::tdma:
        for (int k = 0; k < ch.K(); ++k) slots.push_back({{k}, true, false});
        break;
    case Scheme::noma: {
        Slot s;
        s.members.resize(ch.K());
        std::iota(s.members.begin(), s.members.end(), 0);
        s.full_time = true;
        slots.push_back(s);
        break;
    }
    case Scheme::hybrid:
        if (!grouping) throw std::invalid_argument("brute_force: hybrid scheme needs a grouping");
        grouping->validate(ch.K());
        for (const auto& g : grouping->groups) slots.push_back({g, false, false});
        break;
    }
    return slots;
}

double pow_int(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

/// Best value at one slot duration, with the indices that produced it.
struct Cell {
    double value = -1.0;
    long pattern = -1;
    int amp = -1;
    std::vector<double> p;

    bool better_than(const Cell& o) const {
        if (value != o.value) return value > o.value;
        if (pattern != o.pattern) return pattern < o.pattern;
        return amp < o.amp;
    }
};

} // namespace

double grid_points(const ChannelSet& ch, Scheme scheme, const GridSpec& grid, int slots) {
    const double patterns = pow_int(grid.phase_levels, ch.N());
    const double amps = scheme == Scheme::tdma ? grid.amplitude_levels + 1 : 2 * grid.amplitude_levels + 1;
    const double times = scheme == Scheme::noma ? 1 : grid.time_levels;
    return slots * times * patterns * amps;
}

GridOptimum brute_force(const ChannelSet& ch, const Scenario& sc, Scheme scheme, const GridSpec& grid,
                        const hybrid::Grouping* grouping) {
    sc.validate();
    if (grid.phase_levels < 1 || grid.amplitude_levels < 1 || grid.time_levels < 1)
        throw std::invalid_argument("GridSpec: levels must be positive");
    const std::vector<Slot> slots = slots_for(ch, scheme, grouping);
    const int L = static_cast<int>(slots.size());
    const int N = ch.N();
    const int M = grid.time_levels;
    const int A = grid.amplitude_levels;
    const double total_points = grid_points(ch, scheme, grid, L);
    if (total_points > grid.max_points)
        throw GridTooLarge("brute_force: grid of " + std::to_string(total_points) + " points exceeds the guard");
    const long patterns = static_cast<long>(pow_int(grid.phase_levels, N));
    const double T = sc.T_max;

    // candidate durations per slot (index i -> tau = T i / M)
    auto time_levels = [&](const Slot& s) {
        std::vector<int> lv;
        if (s.full_time) lv.push_back(M);
        else
            for (int i = 1; i <= M; ++i) lv.push_back(i);
        return lv;
    };

    auto pattern_at = [&](long index) {
        BeamVector u(N);
        for (int n = 0; n < N; ++n) {
            const long j = index % grid.phase_levels;
            index /= grid.phase_levels;
            u[n] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / grid.phase_levels);
        }
        return u;
    };

    // amplitude scale for level a of a slot with duration tau
    auto amplitude = [&](const Slot& s, double tau, int a) {
        double load = 0.0;
        for (int k : s.members) load += sc.E[k] / tau * ch.Hr_diag[k].sum();
        const double full = std::sqrt(sc.P_r / (load + sc.sigma_r2 * N));
        if (a <= A) return full * a / A;
        const double cap = std::sqrt(sc.P_r / (sc.sigma_r2 * N));
        return full * std::pow(cap / full, static_cast<double>(a - A) / A);
    };
    auto amp_count = [&](const Slot& s) {
        if (s.depleting || sc.sigma_r2 <= 0.0) return A + 1;
        return 2 * A + 1;
    };

    // value of slot s at duration tau with beam v; powers written to p
    auto evaluate = [&](const Slot& s, double tau, const BeamVector& v, std::vector<double>& p) {
        const double noise = sc.sigma2 + sc.sigma_r2 * v.cwiseAbs2().dot(ch.G_diag);
        const auto m = s.members.size();
        p.assign(m, 0.0);
        if (s.depleting) {
            p[0] = sc.E[s.members[0]] / tau;
        } else {
            convex::KnapsackLp lp;
            lp.c.resize(static_cast<Eigen::Index>(m));
            lp.a.resize(static_cast<Eigen::Index>(m));
            lp.u.resize(static_cast<Eigen::Index>(m));
            for (std::size_t i = 0; i < m; ++i) {
                const int k = s.members[i];
                lp.c[i] = std::norm(cascaded(v, k, ch));
                lp.a[i] = incident_power_gain(v, k, ch);
                lp.u[i] = sc.E[k] / tau;
            }
            lp.b = sc.P_r - sc.sigma_r2 * v.squaredNorm();
            if (lp.b < 0.0) return -1.0;
            const VectorXd sol = convex::solve_knapsack(lp);
            for (std::size_t i = 0; i < m; ++i) p[i] = sol[i];
        }
        double sinr = 0.0;
        for (std::size_t i = 0; i < m; ++i) sinr += p[i] * std::norm(cascaded(v, s.members[i], ch));
        return tau * std::log2(1.0 + sinr / noise);
    };

    // best[l][i] for each slot and duration level
    std::vector<std::vector<Cell>> best(L, std::vector<Cell>(M + 1));
    const int workers = std::max(1, grid.workers);
    std::vector<std::vector<std::vector<Cell>>> partial(workers, best);
    auto work = [&](int w) {
        const long lo = patterns * w / workers, hi = patterns * (w + 1) / workers;
        std::vector<double> p;
        for (long idx = lo; idx < hi; ++idx) {
            const BeamVector u = pattern_at(idx);
            for (int l = 0; l < L; ++l) {
                const Slot& s = slots[l];
                for (int i : time_levels(s)) {
                    const double tau = T * i / M;
                    Cell& cell = partial[w][l][i];
                    for (int a = 0; a < amp_count(s); ++a) {
                        const double val = evaluate(s, tau, amplitude(s, tau, a) * u, p);
                        const Cell cand{val, idx, a, p};
                        if (cand.better_than(cell)) cell = cand;
                    }
                }
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (int w = 0; w < workers; ++w)
        for (int l = 0; l < L; ++l)
            for (int i = 0; i <= M; ++i)
                if (partial[w][l][i].better_than(best[l][i])) best[l][i] = partial[w][l][i];

    // durations on the simplex sum_l i_l <= M (a slot may get zero time)
    GridOptimum out;
    out.points = total_points;
    std::vector<int> choice(L, 0), best_choice;
    double best_value = -1.0;
    std::function<void(int, int, double)> rec = [&](int l, int left, double acc) {
        if (l == L) {
            if (acc > best_value) {
                best_value = acc;
                best_choice = choice;
            }
            return;
        }
        const Slot& s = slots[l];
        if (s.full_time) {
            choice[l] = M;
            rec(l + 1, left - M, acc + best[l][M].value);
            return;
        }
        for (int i = 0; i <= left; ++i) {
            choice[l] = i;
            rec(l + 1, left - i, acc + (i > 0 ? std::max(0.0, best[l][i].value) : 0.0));
        }
    };
    rec(0, M, 0.0);

    out.objective = best_value;
    out.tau.assign(L, 0.0);
    out.v.assign(L, BeamVector::Zero(N));
    out.p.assign(ch.K(), 0.0);
    for (int l = 0; l < L; ++l) {
        const int i = best_choice[l];
        if (i == 0 || best[l][i].value < 0.0) continue;
        const Slot& s = slots[l];
        const double tau = T * i / M;
        out.tau[l] = tau;
        out.v[l] = amplitude(s, tau, best[l][i].amp) * pattern_at(best[l][i].pattern);
        for (std::size_t m = 0; m < s.members.size(); ++m) out.p[s.members[m]] = best[l][i].p[m];
    }
    return out;
}

LpOptimum vertex_enumerate_lp(const convex::KnapsackLp& lp) {
    lp.validate();
    const int K = static_cast<int>(lp.c.size());
    if (K > 16) throw std::invalid_argument("vertex_enumerate_lp: K > 16");
    LpOptimum best;
    best.p = VectorXd::Zero(K);
    best.objective = -1.0;
    const double tol = 1e-12 * (1.0 + lp.b);
    auto consider = [&](const VectorXd& p) {
        if (lp.a.dot(p) > lp.b + tol) return;
        const double val = lp.c.dot(p);
        if (val > best.objective) {
            best.objective = val;
            best.p = p;
        }
    };
    for (long mask = 0; mask < (1L << K); ++mask) {
        VectorXd p(K);
        for (int k = 0; k < K; ++k) p[k] = (mask >> k) & 1 ? lp.u[k] : 0.0;
        consider(p);
        for (int j = 0; j < K; ++j) {
            if (lp.a[j] <= 0.0) continue;
            VectorXd q = p;
            q[j] = 0.0;
            const double x = (lp.b - lp.a.dot(q)) / lp.a[j];
            if (x < 0.0 || x > lp.u[j]) continue;
            q[j] = x;
            consider(q);
        }
    }
    return best;
}

double fractional_sinr_bisection(const std::vector<double>& p, const ChannelSet& ch, const Scenario& sc,
                                 double rel_tol, const SolverOptions& opts) {
    const int N = ch.N(), K = ch.K();
    if (static_cast<int>(p.size()) != K) throw std::invalid_argument("fractional_sinr_bisection: bad power vector");
    MatrixXcd Q = MatrixXcd::Zero(N + 1, N + 1);
    VectorXcd qbar(N + 1);
    VectorXd w = VectorXd::Constant(N, sc.sigma_r2);
    double lo = 0.0, hi = 0.0;
    for (int k = 0; k < K; ++k) {
        qbar.head(N) = ch.q[k];
        qbar[N] = ch.h_d[k];
        Q += p[k] * qbar * qbar.adjoint();
        w += p[k] * ch.Hr_diag[k];
        lo += p[k] * std::norm(ch.h_d[k]) / sc.sigma2;
    }
    for (int k = 0; k < K; ++k) {
        // Cauchy-Schwarz over the budget sum w_n |v_n|^2 <= P_r
        const double reach = std::sqrt(sc.P_r * (ch.q[k].cwiseAbs2().array() / w.array()).sum());
        hi += p[k] * std::pow(std::abs(ch.h_d[k]) + reach, 2) / sc.sigma2;
    }
    hi *= 1.01;
    if (hi <= 0.0) return 0.0;

    convex::SdpProblem prob;
    MatrixXcd corner = MatrixXcd::Zero(N + 1, N + 1);
    corner(N, N) = 1.0;
    prob.equalities.push_back({corner, 1.0});
    VectorXd amp = VectorXd::Zero(N + 1);
    amp.head(N) = w;
    prob.inequalities.push_back({amp.cast<cdouble>().asDiagonal().toDenseMatrix(), sc.P_r});
    prob.scaling = VectorXd::Ones(N + 1);
    for (int n = 0; n < N; ++n) prob.scaling[n] = std::sqrt(sc.P_r / w[n]);
    VectorXd noise = VectorXd::Zero(N + 1);
    noise.head(N) = sc.sigma_r2 * ch.G_diag;

    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        prob.objective = Q - mid * noise.cast<cdouble>().asDiagonal().toDenseMatrix();
        const convex::SdpResult r = convex::solve_sdp(prob, opts);
        if (r.objective - mid * sc.sigma2 >= 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

EqualSnr equal_snr_allocation(const std::vector<double>& snr_energy, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("equal_snr_allocation: T must be positive");
    double total = 0.0;
    for (double s : snr_energy) {
        if (!(s >= 0.0)) throw std::invalid_argument("equal_snr_allocation: negative gain");
        total += s;
    }
    EqualSnr out;
    out.tau.resize(snr_energy.size());
    for (std::size_t k = 0; k < snr_energy.size(); ++k)
        out.tau[k] = total > 0.0 ? T * snr_energy[k] / total : T / static_cast<double>(snr_energy.size());
    out.objective = T * std::log2(1.0 + total / T);
    return out;
}

} // namespace airs::oracle
