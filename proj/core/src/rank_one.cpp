// SPDX-License-Identifier: Apache-2.0
#include "airs/rank_one.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "airs/counter_rng.hpp"

namespace airs::convex {

RankOne extract_rank_one(const MatrixXcd& X, const SolverOptions& opts) {
    RankOne out;
    const auto n = X.rows();
    const double trace = X.trace().real();
    if (n == 0 || X.cwiseAbs().maxCoeff() == 0.0 || trace <= 0.0) {
        out.v = VectorXcd::Zero(n);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (X + X.adjoint()));
    const double lmax = std::max(0.0, es.eigenvalues()[n - 1]);
    out.v = std::sqrt(lmax) * es.eigenvectors().col(n - 1);
    out.ratio = lmax / trace;
    out.exact = out.ratio >= opts.rank_one_ratio;
    return out;
}

std::vector<VectorXcd> gaussian_samples(const MatrixXcd& X, int count, std::uint64_t seed) {
    const auto n = X.rows();
    // X = U diag(l) U^H; sample U diag(sqrt(l)) w with w ~ CN(0, I)
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (X + X.adjoint()));
    const VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const MatrixXcd F = es.eigenvectors() * root.asDiagonal();
    std::vector<VectorXcd> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    CounterRng rng(seed);
    for (int s = 0; s < count; ++s) {
        VectorXcd w(n);
        for (Eigen::Index i = 0; i < n; ++i) w[i] = rng.complex_normal();
        out.push_back(F * w);
    }
    return out;
}

} // namespace airs::convex
