// SPDX-License-Identifier: Apache-2.0
#include "airs/passive.hpp"

#include <cmath>
#include <stdexcept>

#include "tdma_internal.hpp"

namespace airs {

tdma::TdmaSolution solve_passive_baseline(const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts) {
    sc.validate();
    opts.validate();
    if (ch.K() != sc.K || ch.N() != sc.N)
        throw std::invalid_argument("solve_passive_baseline: channel set does not match scenario");
    const int K = ch.K();
    std::vector<BeamVector> v0(K);
    for (int k = 0; k < K; ++k) v0[k] = 0.5 * phase_aligned(k, ch);
    tdma::TdmaSolution sol = tdma::detail::run_sca(ch, sc, opts, std::move(v0), true);

    // unit modulus, keep phases
    for (auto& v : sol.v)
        for (Eigen::Index n = 0; n < v.size(); ++n) v[n] = std::abs(v[n]) > 0.0 ? v[n] / std::abs(v[n]) : cdouble(1.0);

    // with beams fixed and no amplification budget the best split equalizes the SNRs
    std::vector<double> snr_energy(K);
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
        snr_energy[k] = sc.E[k] * std::norm(cascaded(sol.v[k], k, ch)) / sc.sigma2;
        total += snr_energy[k];
    }
    for (int k = 0; k < K; ++k) {
        sol.tau[k] = sc.T_max * snr_energy[k] / total;
        sol.p[k] = sol.tau[k] > 0.0 ? sc.E[k] / sol.tau[k] : 0.0;
        sol.S[k] = snr_energy[k];
    }
    sol.residual = 0.0;
    sol.objective = tdma::tdma_throughput(sol, ch, sc);
    return sol;
}

} // namespace airs
