// SPDX-License-Identifier: Apache-2.0
#include "airs/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace airs::convex {

void KnapsackLp::validate() const {
    const auto k = c.size();
    if (a.size() != k || u.size() != k) throw std::invalid_argument("KnapsackLp: size mismatch");
    auto bad = [](const VectorXd& x) { return !x.allFinite() || (x.array() < 0.0).any(); };
    if (bad(c) || bad(a) || bad(u)) throw std::invalid_argument("KnapsackLp: entries must be finite and nonnegative");
    if (!std::isfinite(b) || b < 0.0) throw std::invalid_argument("KnapsackLp: budget must be finite and nonnegative");
}

VectorXd solve_knapsack(const KnapsackLp& lp) {
    lp.validate();
    const auto k = lp.c.size();
    VectorXd p = VectorXd::Zero(k);
    std::vector<Eigen::Index> order;
    double budget = lp.b;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (lp.a[i] == 0.0)
            p[i] = lp.u[i];
        else if (lp.c[i] > 0.0)
            order.push_back(i);
    }
    // c_i/a_i > c_j/a_j without dividing; index breaks ties
    std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        const double lhs = lp.c[i] * lp.a[j], rhs = lp.c[j] * lp.a[i];
        return lhs != rhs ? lhs > rhs : i < j;
    });
    for (auto i : order) {
        if (budget <= 0.0) break;
        p[i] = std::min(lp.u[i], budget / lp.a[i]);
        budget -= p[i] * lp.a[i];
    }
    return p;
}

} // namespace airs::convex
