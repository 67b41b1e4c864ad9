// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "airs/types.hpp"

namespace airs::convex {

/// max c^T p  s.t.  0 <= p <= u,  a^T p <= b. All data nonnegative.
struct KnapsackLp {
    VectorXd c;
    VectorXd a;
    VectorXd u;
    double b = 0.0;

    void validate() const;
    double objective(const VectorXd& p) const { return c.dot(p); }
};

/// Greedy fill by decreasing c/a; zero-weight entries go to their bound first.
VectorXd solve_knapsack(const KnapsackLp& lp);

} // namespace airs::convex
