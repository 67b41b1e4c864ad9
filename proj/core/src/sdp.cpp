// SPDX-License-Identifier: Apache-2.0
#include "airs/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace airs::convex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Re Tr(A B)
double re_trace(const MatrixXcd& A, const MatrixXcd& B) {
    return (A.transpose().cwiseProduct(B)).sum().real();
}

MatrixXcd hermitian_part(const MatrixXcd& A) { return 0.5 * (A + A.adjoint()); }

bool is_hermitian(const MatrixXcd& A, double rel = 1e-10) {
    if (A.rows() != A.cols()) return false;
    const double scale = std::max(1e-300, A.cwiseAbs().maxCoeff());
    return (A - A.adjoint()).cwiseAbs().maxCoeff() <= rel * scale;
}

MatrixXcd congruence(const MatrixXcd& A, const VectorXd& d) {
    return d.asDiagonal() * A * d.asDiagonal();
}

/// Largest alpha in (0, inf] with X + alpha dX still PSD; X must be PD.
double max_step_psd(const MatrixXcd& X, const MatrixXcd& dX) {
    Eigen::LLT<MatrixXcd> llt(X);
    if (llt.info() != Eigen::Success) return 0.0;
    const auto L = llt.matrixL();
    MatrixXcd Y = L.solve(dX);
    MatrixXcd M = L.solve(Y.adjoint().eval());
    M = hermitian_part(M);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double max_step_lp(const VectorXd& x, const VectorXd& dx) {
    double a = kInf;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (dx[i] < 0.0) a = std::min(a, -x[i] / dx[i]);
    return a;
}

/// Equilibrated minimization form: min <C, W>  s.t. <A_i, W> + [slack_i] = b_i.
struct Standard {
    int n = 0;
    int m = 0;
    int l = 0;
    MatrixXcd C;
    std::vector<MatrixXcd> A;
    VectorXd b;
    std::vector<int> slack_of_row;  // -1 for equality rows
    std::vector<int> row_of_slack;
    std::vector<double> row_scale;
    double c_scale = 1.0;
    VectorXd d;
};

Standard standardize(const SdpProblem& p) {
    Standard s;
    s.n = p.dim();
    s.d = p.scaling.size() ? p.scaling : VectorXd::Ones(s.n);
    s.C = congruence(p.objective, s.d);
    if (p.sense == Sense::maximize) s.C = -s.C;
    s.c_scale = s.C.norm();
    if (s.c_scale == 0.0) s.c_scale = 1.0;
    s.C /= s.c_scale;

    auto add_row = [&](const TraceConstraint& tc, bool inequality) {
        MatrixXcd A = congruence(tc.matrix, s.d);
        double nrm = A.norm();
        if (nrm == 0.0) {
            if (inequality ? tc.rhs < 0.0 : tc.rhs != 0.0)
                throw SolverError(SolveStatus::infeasible, "solve_sdp: constraint with zero matrix is infeasible");
            return;  // trivially satisfied
        }
        s.A.push_back(A / nrm);
        s.row_scale.push_back(nrm);
        const int row = static_cast<int>(s.A.size()) - 1;
        if (inequality) {
            s.slack_of_row.push_back(s.l);
            s.row_of_slack.push_back(row);
            ++s.l;
        } else {
            s.slack_of_row.push_back(-1);
        }
        return;
    };
    std::vector<double> rhs;
    for (const auto& e : p.equalities) {
        const auto before = s.A.size();
        add_row(e, false);
        if (s.A.size() != before) rhs.push_back(e.rhs / s.row_scale.back());
    }
    for (const auto& e : p.inequalities) {
        const auto before = s.A.size();
        add_row(e, true);
        if (s.A.size() != before) rhs.push_back(e.rhs / s.row_scale.back());
    }
    s.m = static_cast<int>(s.A.size());
    s.b = Eigen::Map<VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    return s;
}

struct Iterate {
    MatrixXcd W, Z;
    VectorXd s, z, y;
};

struct Direction {
    MatrixXcd dW, dZ;
    VectorXd ds, dz, dy;
};

} // namespace

void SdpProblem::validate() const {
    const auto n = objective.rows();
    if (n < 1 || objective.cols() != n) throw std::invalid_argument("SdpProblem: objective must be square and non-empty");
    if (!is_hermitian(objective)) throw std::invalid_argument("SdpProblem: objective is not Hermitian");
    for (const auto* group : {&equalities, &inequalities})
        for (const auto& c : *group) {
            if (c.matrix.rows() != n || c.matrix.cols() != n)
                throw std::invalid_argument("SdpProblem: constraint dimension mismatch");
            if (!is_hermitian(c.matrix)) throw std::invalid_argument("SdpProblem: constraint matrix is not Hermitian");
            if (!std::isfinite(c.rhs)) throw std::invalid_argument("SdpProblem: non-finite right-hand side");
        }
    if (scaling.size() != 0 && (scaling.size() != n || (scaling.array() <= 0.0).any()))
        throw std::invalid_argument("SdpProblem: scaling must be empty or a positive vector of length n");
}

SdpResult solve_sdp(const SdpProblem& p, const SolverOptions& opts) {
    p.validate();
    SdpResult res;
    Standard st;
    try {
        st = standardize(p);
    } catch (const SolverError& e) {
        res.status = e.status();
        res.X = MatrixXcd::Zero(p.dim(), p.dim());
        return res;
    }
    const int n = st.n, m = st.m, l = st.l;
    const double nu = n + l;

    double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
    for (int i = 0; i < m; ++i) xi = std::max(xi, n * (1.0 + std::abs(st.b[i])) / 2.0);
    const double eta = std::max(10.0, std::sqrt(static_cast<double>(n)));

    Iterate it;
    it.W = xi * MatrixXcd::Identity(n, n);
    it.Z = eta * MatrixXcd::Identity(n, n);
    it.s = VectorXd::Constant(l, xi);
    it.z = VectorXd::Constant(l, eta);
    it.y = VectorXd::Zero(m);

    const double b_norm = st.b.norm();
    const MatrixXcd I = MatrixXcd::Identity(n, n);

    auto apply_A = [&](const MatrixXcd& W, const VectorXd& s) {
        VectorXd out(m);
        for (int i = 0; i < m; ++i) {
            out[i] = re_trace(st.A[i], W);
            if (st.slack_of_row[i] >= 0) out[i] += s[st.slack_of_row[i]];
        }
        return out;
    };
    auto apply_At = [&](const VectorXd& y) {
        MatrixXcd out = MatrixXcd::Zero(n, n);
        for (int i = 0; i < m; ++i) out += y[i] * st.A[i];
        return out;
    };
    auto apply_At_lp = [&](const VectorXd& y) {
        VectorXd out(l);
        for (int j = 0; j < l; ++j) out[j] = y[st.row_of_slack[j]];
        return out;
    };

    SolveStatus status = SolveStatus::max_iter_exceeded;
    int iter = 0;
    double pinf = kInf, dinf = kInf, gap = kInf;
    int stalls = 0;

    for (; iter < opts.sdp_max_iter; ++iter) {
        const VectorXd rp = st.b - apply_A(it.W, it.s);
        const MatrixXcd Rd = st.C - apply_At(it.y) - it.Z;
        const VectorXd rds = -apply_At_lp(it.y) - it.z;
        const double pobj = re_trace(st.C, it.W);
        const double dobj = st.b.dot(it.y);
        const double compl_ = re_trace(it.W, it.Z) + it.s.dot(it.z);
        const double mu = compl_ / nu;

        pinf = rp.norm() / (1.0 + b_norm);
        dinf = std::sqrt(Rd.squaredNorm() + rds.squaredNorm()) / (1.0 + 1.0);
        gap = std::max(std::abs(pobj - dobj), compl_) / (1.0 + std::abs(pobj) + std::abs(dobj));
        if (pinf <= opts.sdp_tol && dinf <= opts.sdp_tol && gap <= opts.sdp_tol) {
            status = SolveStatus::optimal;
            break;
        }
        if (dobj > 1e10 && pinf > opts.sdp_tol) {
            status = SolveStatus::infeasible;
            break;
        }
        if (!std::isfinite(mu) || it.W.norm() > 1e14) {
            status = SolveStatus::numerical_error;
            break;
        }

        // Z loses definiteness once the iterate is within roundoff of a
        // rank-deficient optimum; accept it if the residuals are nearly there.
        auto breakdown = [&] {
            const double accept = std::max(opts.sdp_tol, opts.tol_gap);
            return std::max({pinf, dinf, gap}) <= accept ? SolveStatus::optimal : SolveStatus::numerical_error;
        };
        Eigen::LLT<MatrixXcd> zllt(it.Z);
        if (zllt.info() != Eigen::Success) {
            status = breakdown();
            break;
        }
        const MatrixXcd Zinv = hermitian_part(zllt.solve(I));
        const VectorXd s_over_z = it.s.cwiseQuotient(it.z);

        // Schur complement M_ij = Re Tr(A_i W A_j Z^-1) + LP part
        std::vector<MatrixXcd> WAZ(m);
        for (int j = 0; j < m; ++j) WAZ[j] = it.W * st.A[j] * Zinv;
        MatrixXd M(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) M(i, j) = re_trace(st.A[i], WAZ[j]);
        for (int j = 0; j < l; ++j) M(st.row_of_slack[j], st.row_of_slack[j]) += s_over_z[j];
        M = 0.5 * (M + M.transpose());
        Eigen::LDLT<MatrixXd> mldlt(M);
        if (mldlt.info() != Eigen::Success) {
            status = breakdown();
            break;
        }
        const MatrixXcd WRdZ = it.W * Rd * Zinv;

        auto solve_direction = [&](const MatrixXcd& R, const VectorXd& r_lp) {
            Direction d;
            const MatrixXcd RZ = R * Zinv;
            VectorXd rhs(m);
            for (int i = 0; i < m; ++i) rhs[i] = rp[i] - re_trace(st.A[i], RZ) + re_trace(st.A[i], WRdZ);
            for (int j = 0; j < l; ++j) {
                const int i = st.row_of_slack[j];
                rhs[i] += -r_lp[j] / it.z[j] + s_over_z[j] * rds[j];
            }
            d.dy = mldlt.solve(rhs);
            d.dZ = Rd - apply_At(d.dy);
            d.dW = hermitian_part(RZ - it.W * d.dZ * Zinv);
            d.dz = rds - apply_At_lp(d.dy);
            d.ds = (r_lp - it.s.cwiseProduct(d.dz)).cwiseQuotient(it.z);
            return d;
        };
        auto step_lengths = [&](const Direction& d) {
            const double ap = std::min(max_step_psd(it.W, d.dW), max_step_lp(it.s, d.ds));
            const double ad = std::min(max_step_psd(it.Z, d.dZ), max_step_lp(it.z, d.dz));
            return std::pair{ap, ad};
        };

        // predictor
        const Direction aff = solve_direction(-it.W * it.Z, -it.s.cwiseProduct(it.z));
        auto [ap_aff, ad_aff] = step_lengths(aff);
        ap_aff = std::min(1.0, ap_aff);
        ad_aff = std::min(1.0, ad_aff);
        const double mu_aff =
            (re_trace(it.W + ap_aff * aff.dW, it.Z + ad_aff * aff.dZ) +
             (it.s + ap_aff * aff.ds).dot(it.z + ad_aff * aff.dz)) / nu;
        const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

        // corrector
        const MatrixXcd Rc = sigma * mu * I - it.W * it.Z - aff.dW * aff.dZ;
        const VectorXd rc = VectorXd::Constant(l, sigma * mu) - it.s.cwiseProduct(it.z) - aff.ds.cwiseProduct(aff.dz);
        const Direction dir = solve_direction(Rc, rc);
        auto [ap, ad] = step_lengths(dir);
        constexpr double gamma = 0.98;
        ap = std::min(1.0, gamma * ap);
        ad = std::min(1.0, gamma * ad);
        if (ap < 1e-12 && ad < 1e-12) {
            if (++stalls > 3) {
                status = breakdown();
                break;
            }
        }
        it.W = hermitian_part(it.W + ap * dir.dW);
        it.s += ap * dir.ds;
        it.Z = hermitian_part(it.Z + ad * dir.dZ);
        it.z += ad * dir.dz;
        it.y += ad * dir.dy;
    }

    res.status = status;
    res.iterations = iter;
    res.primal_residual = pinf;
    res.dual_residual = dinf;
    res.relative_gap = gap;
    res.X = hermitian_part(st.d.asDiagonal() * it.W * st.d.asDiagonal());
    res.objective = re_trace(p.objective, res.X);
    res.slack.resize(static_cast<Eigen::Index>(p.inequalities.size()));
    for (std::size_t j = 0; j < p.inequalities.size(); ++j)
        res.slack[static_cast<Eigen::Index>(j)] = p.inequalities[j].rhs - re_trace(p.inequalities[j].matrix, res.X);
    return res;
}

} // namespace airs::convex
