// SPDX-License-Identifier: Apache-2.0
// Helpers shared by the unit and acceptance tests. Everything here is computed
// independently of the solvers under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "airs/channel.hpp"
#include "airs/scenario.hpp"

namespace airs::test {

/// paper-v defaults resized to K devices and N elements.
inline Scenario small_scenario(int K, int N) {
    Scenario sc = preset("paper-v");
    sc.set_device_count(K);
    sc.N = N;
    return sc;
}

/// Golden-section maximizer of a unimodal f on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    return std::max({f(lo), f(hi), f1, f2});
}

/// Best received SNR of a single device over one IRS element at power p:
/// phases aligned, amplitude a limited by p a^2 |h_r|^2 + sigma_r^2 a^2 <= P_r.
/// f(a) = p (|h_d| + a |q|)^2 / (sigma^2 + sigma_r^2 a^2 |g|^2).
inline double single_element_snr(const ChannelSet& ch, int k, double p, const Scenario& sc) {
    const double hd = std::abs(ch.h_d[k]);
    const double q = std::abs(ch.q[k][0]);
    const double g2 = std::norm(ch.g[0]);
    const double a_max = std::sqrt(sc.P_r / (p * std::norm(ch.h_r[k][0]) + sc.sigma_r2));
    auto f = [&](double a) { return p * (hd + a * q) * (hd + a * q) / (sc.sigma2 + sc.sigma_r2 * a * a * g2); };
    return golden_max(f, 0.0, a_max);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Channel set with every device a copy of device 0.
inline ChannelSet cloned_devices(const ChannelSet& ch, int K) {
    ChannelSet out = ch;
    out.h_r.assign(K, ch.h_r[0]);
    out.h_d.assign(K, ch.h_d[0]);
    out.device_pos.assign(K, ch.device_pos[0]);
    out.derive();
    return out;
}

} // namespace airs::test
