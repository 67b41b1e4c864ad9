// SPDX-License-Identifier: Apache-2.0
#include "airs/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace airs::convex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double eps = std::numeric_limits<double>::epsilon();
const double kLn2 = std::numbers::ln2;

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_outer(Triplets& h, const std::vector<int>& support, const VectorXd& u, double scale) {
    for (int i : support)
        for (int j : support) h.emplace_back(i, j, scale * u[i] * u[j]);
}

void add_sym(Triplets& h, const std::vector<SymEntry>& entries, double scale) {
    for (const auto& e : entries) {
        h.emplace_back(e.row, e.col, scale * e.value);
        if (e.row != e.col) h.emplace_back(e.col, e.row, scale * e.value);
    }
}

/// x^T M x and its gradient (2 M x) accumulated into grad with weight w.
double quad_form(const std::vector<SymEntry>& entries, const VectorXd& x, VectorXd* grad, double w) {
    double q = 0.0;
    for (const auto& e : entries) {
        if (e.row == e.col) {
            q += e.value * x[e.row] * x[e.row];
            if (grad) (*grad)[e.row] += w * 2.0 * e.value * x[e.row];
        } else {
            q += 2.0 * e.value * x[e.row] * x[e.col];
            if (grad) {
                (*grad)[e.row] += w * 2.0 * e.value * x[e.col];
                (*grad)[e.col] += w * 2.0 * e.value * x[e.row];
            }
        }
    }
    return q;
}

std::vector<int> support_of(const BarrierConstraint& c) {
    std::set<int> s;
    for (const auto& [i, v] : c.affine.terms) s.insert(i);
    for (const auto& e : c.over_time) s.insert({e.row, e.col});
    for (const auto& e : c.quadratic) s.insert({e.row, e.col});
    if (c.time_index >= 0 && !c.over_time.empty()) s.insert(c.time_index);
    return {s.begin(), s.end()};
}

std::vector<int> support_of(const PerspectiveTerm& t) {
    std::set<int> s;
    for (const auto& [i, v] : t.tau.terms) s.insert(i);
    for (const auto& [i, v] : t.snr.terms) s.insert(i);
    return {s.begin(), s.end()};
}

double perspective(double tau, double snr) {
    if (tau <= 0.0) return snr >= 0.0 ? 0.0 : -kInf;
    if (snr <= -tau) return -kInf;
    return tau * std::log1p(snr / tau) / kLn2;
}

class Barrier {
public:
    explicit Barrier(const BarrierProblem& p) : p_(p) {
        for (const auto& c : p.constraints) csupport_.push_back(support_of(c));
        for (const auto& t : p.terms) tsupport_.push_back(support_of(t));
    }

    /// -t f(x) - sum log(-g_i(x)); +inf outside the domain.
    double value(const VectorXd& x, double t) const {
        double phi = 0.0;
        for (const auto& c : p_.constraints) {
            const double g = c.eval(x);
            if (!(g < 0.0)) return kInf;
            phi -= std::log(-g);
        }
        for (const auto& term : p_.terms) {
            const double tau = term.tau.eval(x);
            if (!(tau > 0.0)) return kInf;
            const double f = perspective(tau, term.snr.eval(x));
            if (!std::isfinite(f)) return kInf;
            phi -= t * term.weight * f;
        }
        return phi;
    }

    void derivatives(const VectorXd& x, double t, VectorXd& grad, Eigen::SparseMatrix<double>& hess) const {
        const int n = p_.num_vars;
        grad.setZero(n);
        Triplets h;
        VectorXd gg(n);
        for (std::size_t ci = 0; ci < p_.constraints.size(); ++ci) {
            const auto& c = p_.constraints[ci];
            const auto& sup = csupport_[ci];
            for (int i : sup) gg[i] = 0.0;
            const double g = c.eval(x);
            double tau = 1.0;
            double q = 0.0;
            if (!c.over_time.empty()) {
                tau = x[c.time_index];
                q = quad_form(c.over_time, x, &gg, 1.0 / tau);
                gg[c.time_index] -= q / (tau * tau);
            }
            quad_form(c.quadratic, x, &gg, 1.0);
            for (const auto& [i, v] : c.affine.terms) gg[i] += v;

            const double inv = 1.0 / (-g);
            for (int i : sup) grad[i] += gg[i] * inv;
            add_outer(h, sup, gg, inv * inv);
            // curvature of g scaled by 1/(-g)
            if (!c.over_time.empty()) {
                add_sym(h, c.over_time, 2.0 * inv / tau);
                VectorXd mx = VectorXd::Zero(n);
                quad_form(c.over_time, x, &mx, 1.0);  // 2 M x
                const int ti = c.time_index;
                for (int i : sup) {
                    if (i == ti || mx[i] == 0.0) continue;
                    const double cross = -mx[i] / (tau * tau) * inv;
                    h.emplace_back(i, ti, cross);
                    h.emplace_back(ti, i, cross);
                }
                h.emplace_back(ti, ti, 2.0 * q / (tau * tau * tau) * inv);
            }
            add_sym(h, c.quadratic, 2.0 * inv);
        }
        VectorXd u(n);
        for (std::size_t k = 0; k < p_.terms.size(); ++k) {
            const auto& term = p_.terms[k];
            const auto& sup = tsupport_[k];
            const double tau = term.tau.eval(x);
            const double snr = term.snr.eval(x);
            const double w = t * term.weight;
            const double d_snr = tau / ((tau + snr) * kLn2);
            const double d_tau = (std::log1p(snr / tau) - snr / (tau + snr)) / kLn2;
            for (int i : sup) u[i] = 0.0;
            for (const auto& [i, v] : term.tau.terms) {
                grad[i] -= w * d_tau * v;
                u[i] += snr * v;
            }
            for (const auto& [i, v] : term.snr.terms) {
                grad[i] -= w * d_snr * v;
                u[i] -= tau * v;
            }
            // Hessian of the perspective is -(1/(tau (tau+snr)^2 ln2)) u u^T
            add_outer(h, sup, u, w / (tau * (tau + snr) * (tau + snr) * kLn2));
        }
        hess.resize(n, n);
        hess.setFromTriplets(h.begin(), h.end());
    }

private:
    const BarrierProblem& p_;
    std::vector<std::vector<int>> csupport_;
    std::vector<std::vector<int>> tsupport_;
};

} // namespace

double AffineExpr::eval(const VectorXd& x) const {
    double s = constant;
    for (const auto& [i, v] : terms) s += v * x[i];
    return s;
}

double BarrierConstraint::eval(const VectorXd& x) const {
    double g = affine.eval(x) + quad_form(quadratic, x, nullptr, 0.0);
    if (!over_time.empty()) {
        const double tau = x[time_index];
        if (!(tau > 0.0)) return kInf;
        g += quad_form(over_time, x, nullptr, 0.0) / tau;
    }
    return g;
}

void BarrierProblem::validate() const {
    if (num_vars < 1) throw std::invalid_argument("BarrierProblem: no variables");
    auto check_index = [&](int i) {
        if (i < 0 || i >= num_vars) throw std::invalid_argument("BarrierProblem: variable index out of range");
    };
    auto check_affine = [&](const AffineExpr& a) {
        for (const auto& [i, v] : a.terms) {
            check_index(i);
            if (!std::isfinite(v)) throw std::invalid_argument("BarrierProblem: non-finite coefficient");
        }
    };
    for (const auto& t : terms) {
        check_affine(t.tau);
        check_affine(t.snr);
        if (!(t.weight > 0.0)) throw std::invalid_argument("BarrierProblem: term weight must be positive");
    }
    for (const auto& c : constraints) {
        check_affine(c.affine);
        for (const auto* set : {&c.over_time, &c.quadratic})
            for (const auto& e : *set) {
                check_index(e.row);
                check_index(e.col);
            }
        if (!c.over_time.empty()) {
            check_index(c.time_index);
            for (const auto& e : c.over_time)
                if (e.row == c.time_index || e.col == c.time_index)
                    throw std::invalid_argument("BarrierProblem: quadratic-over-linear form touches its denominator");
        }
    }
}

double BarrierProblem::objective(const VectorXd& x) const {
    double f = 0.0;
    for (const auto& t : terms) f += t.weight * perspective(t.tau.eval(x), t.snr.eval(x));
    return f;
}

double BarrierProblem::max_violation(const VectorXd& x) const {
    double worst = -kInf;
    for (const auto& c : constraints) worst = std::max(worst, c.eval(x));
    return worst;
}

BarrierResult solve_barrier(const BarrierProblem& p, const VectorXd& start, const SolverOptions& opts) {
    p.validate();
    if (start.size() != p.num_vars) throw std::invalid_argument("solve_barrier: start has wrong size");
    BarrierResult res;
    res.x = start;
    const Barrier barrier(p);
    double t = opts.barrier_t0;
    if (!std::isfinite(barrier.value(start, t))) {
        res.status = SolveStatus::infeasible_start;
        res.objective = p.objective(start);
        return res;
    }
    const double m = std::max<double>(1.0, static_cast<double>(p.constraints.size()));
    VectorXd x = start;
    VectorXd grad;
    Eigen::SparseMatrix<double> hess;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    int steps = 0;
    SolveStatus status = SolveStatus::optimal;

    while (true) {
        // centering
        int centering_steps = 0;
        while (true) {
            if (steps >= opts.max_iter) {
                status = SolveStatus::max_iter_exceeded;
                break;
            }
            barrier.derivatives(x, t, grad, hess);
            VectorXd d = hess.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
            Eigen::SparseMatrix<double> scaled = d.asDiagonal() * hess * d.asDiagonal();
            for (int i = 0; i < p.num_vars; ++i) scaled.coeffRef(i, i) += 1e-13;
            ldlt.compute(scaled);
            if (ldlt.info() != Eigen::Success) {
                status = SolveStatus::numerical_error;
                break;
            }
            const VectorXd dx = d.cwiseProduct(ldlt.solve(-d.cwiseProduct(grad)));
            const double slope = grad.dot(dx);
            const double decrement = -slope;
            ++steps;
            if (!(decrement >= 0.0) || !dx.allFinite()) {
                status = SolveStatus::numerical_error;
                break;
            }
            if (decrement / 2.0 <= 1e-10) break;

            const double phi0 = barrier.value(x, t);
            double s = 1.0;
            double phi = barrier.value(x + s * dx, t);
            while (s >= opts.min_step && !(phi <= phi0 + opts.ls_alpha * s * slope)) {
                s *= opts.ls_beta;
                phi = barrier.value(x + s * dx, t);
            }
            if (s < opts.min_step) {
                // roundoff in phi at large t: a tiny decrement means we are centered
                if (decrement / 2.0 <= 1e-6) break;
                status = SolveStatus::line_search_stall;
                break;
            }
            x += s * dx;
            // further Newton steps cannot move phi beyond its rounding level
            if (decrement / 2.0 <= 1e-6 && phi0 - phi <= 64.0 * eps * std::abs(phi0)) break;
            if (++centering_steps >= 100) break;
        }
        res.trace.push_back(p.objective(x));
        if (status != SolveStatus::optimal) break;
        if (m / t <= opts.tol_gap) break;
        t *= opts.barrier_growth;
    }
    res.x = x;
    res.objective = p.objective(x);
    res.status = status;
    res.newton_steps = steps;
    res.gap_bound = m / t;
    return res;
}

} // namespace airs::convex
