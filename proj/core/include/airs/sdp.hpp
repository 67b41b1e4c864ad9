// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "airs/options.hpp"
#include "airs/types.hpp"

namespace airs::convex {

/// Tr(matrix * X) compared against rhs. `matrix` must be Hermitian.
struct TraceConstraint {
    MatrixXcd matrix;
    double rhs = 0.0;
};

enum class Sense { maximize, minimize };

/// optimize Tr(C X)  s.t.  Tr(A_i X) = b_i,  Tr(B_j X) <= c_j,  X >= 0 (Hermitian PSD).
///
/// `scaling`, when non-empty, is a positive diagonal D: the solver works on
/// W = D^-1 X D^-1, which leaves the problem unchanged but lets callers
/// equilibrate badly-scaled data.
struct SdpProblem {
    MatrixXcd objective;
    std::vector<TraceConstraint> equalities;
    std::vector<TraceConstraint> inequalities;
    Sense sense = Sense::maximize;
    VectorXd scaling;

    int dim() const { return static_cast<int>(objective.rows()); }
    /// Throws std::invalid_argument on non-Hermitian or mismatched data.
    void validate() const;
};

struct SdpResult {
    MatrixXcd X;
    /// Slack of each inequality, c_j - Tr(B_j X).
    VectorXd slack;
    double objective = 0.0;
    SolveStatus status = SolveStatus::numerical_error;
    int iterations = 0;
    // measured on the equilibrated problem
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double relative_gap = 0.0;
};

/// Infeasible-start primal-dual path following (HKM direction, Mehrotra
/// predictor-corrector) over the product of the Hermitian PSD cone and the
/// nonnegative orthant that holds inequality slacks.
SdpResult solve_sdp(const SdpProblem& p, const SolverOptions& opts = {});

} // namespace airs::convex
