// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "airs/options.hpp"
#include "airs/types.hpp"

namespace airs::convex {

struct RankOne {
    VectorXcd v;
    /// lambda_max / Tr(X) >= opts.rank_one_ratio
    bool exact = true;
    double ratio = 1.0;
};

/// v = sqrt(lambda_max) u_max of a PSD matrix. A zero matrix gives v = 0, exact.
RankOne extract_rank_one(const MatrixXcd& X, const SolverOptions& opts = {});

/// `count` draws from CN(0, X) (X PSD). Deterministic in `seed`.
std::vector<VectorXcd> gaussian_samples(const MatrixXcd& X, int count, std::uint64_t seed);

} // namespace airs::convex
