// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "airs/options.hpp"
#include "airs/types.hpp"

namespace airs::convex {

/// constant + sum coef * x[index]
struct AffineExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    double eval(const VectorXd& x) const;
};

/// weight * tau * log2(1 + snr / tau), concave in (tau, snr) for tau > 0.
struct PerspectiveTerm {
    double weight = 1.0;
    AffineExpr tau;
    AffineExpr snr;
};

struct SymEntry {
    int row;
    int col;
    double value;
};

/// (1/x[time_index]) x^T M x + x^T P x + a^T x + a_0 <= 0.
/// M and P are symmetric PSD, given by their upper-or-lower entries (each
/// off-diagonal pair listed once); M must not touch x[time_index].
struct BarrierConstraint {
    int time_index = -1;
    std::vector<SymEntry> over_time;
    std::vector<SymEntry> quadratic;
    AffineExpr affine;

    double eval(const VectorXd& x) const;
};

/// maximize sum of perspective terms subject to convex constraints.
struct BarrierProblem {
    int num_vars = 0;
    std::vector<PerspectiveTerm> terms;
    std::vector<BarrierConstraint> constraints;

    void validate() const;
    double objective(const VectorXd& x) const;
    /// max_i g_i(x); <= 0 means feasible.
    double max_violation(const VectorXd& x) const;
};

struct BarrierResult {
    VectorXd x;
    double objective = 0.0;
    SolveStatus status = SolveStatus::numerical_error;
    int newton_steps = 0;
    /// m / t at return: a bound on the suboptimality of `objective`.
    double gap_bound = 0.0;
    /// objective after each centering step
    std::vector<double> trace;
};

/// Log-barrier path following with damped Newton centering. `start` must be
/// strictly feasible, otherwise the result carries infeasible_start.
BarrierResult solve_barrier(const BarrierProblem& p, const VectorXd& start, const SolverOptions& opts = {});

} // namespace airs::convex
