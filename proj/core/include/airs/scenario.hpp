// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace airs {

using Point3 = std::array<double, 3>;

/// dBm -> W: 10^((dBm - 30) / 10).
double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

/// Geometry, propagation and budget parameters of one uplink deployment.
struct Scenario {
    Point3 ap_pos{0.0, 0.0, 0.0};
    Point3 irs_pos{0.0, 0.0, 4.0};
    Point3 device_center{30.0, 0.0, 4.0};
    double device_radius = 5.0;

    int K = 10;
    int N = 50;
    double T_max = 0.1;
    /// Per-device energy budgets in joules; size K.
    std::vector<double> E = std::vector<double>(10, 0.01);
    double P_r = 1e-3;
    double sigma2 = 3.1622776601683795e-11;
    double sigma_r2 = 3.1622776601683795e-11;

    double alpha_ris = 2.2;
    double alpha_direct = 3.4;
    double ref_loss_db = 30.0;

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;

    /// Resizes E to K, broadcasting the first entry (or `energy` when E is empty).
    void set_device_count(int k, double energy = -1.0);

    /// Flat key/value view; keys match the [scenario] section of run configs.
    std::map<std::string, std::string> to_key_values() const;
    static Scenario from_key_values(const std::map<std::string, std::string>& kv,
                                    const Scenario& base);

    /// FNV-1a over the canonical key/value serialization.
    std::uint64_t hash() const;
};

/// Defaults of the reference experiment setup: N = 50, T = 0.1 s, E_k = 0.01 J,
/// x_IRS = 0, x_D = 30 m, sigma^2 = sigma_r^2 = -75 dBm, P_r = 0 dBm, K = 10.
Scenario preset(const std::string& name);

} // namespace airs
