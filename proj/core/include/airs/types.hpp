// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace airs {

using cdouble = std::complex<double>;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;
using MatrixXcd = Eigen::MatrixXcd;
using MatrixXd = Eigen::MatrixXd;

/// Per-element reflection/amplification coefficients of one IRS configuration.
/// The received cascaded term is v^H q, i.e. the coefficients enter conjugated.
using BeamVector = Eigen::VectorXcd;

enum class SolveStatus {
    optimal,
    infeasible,
    infeasible_start,
    max_iter_exceeded,
    line_search_stall,
    numerical_error,
};

const char* to_string(SolveStatus s);

/// Raised when a subproblem fails in a way the caller cannot recover from.
class SolverError : public std::runtime_error {
public:
    SolverError(SolveStatus status, const std::string& what)
        : std::runtime_error(what), status_(status) {}
    SolveStatus status() const noexcept { return status_; }

private:
    SolveStatus status_;
};

} // namespace airs
