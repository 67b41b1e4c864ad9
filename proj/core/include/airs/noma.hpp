// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "airs/channel.hpp"
#include "airs/options.hpp"
#include "airs/scenario.hpp"
#include "airs/sdp.hpp"
#include "airs/types.hpp"

namespace airs::noma {

/// Charnes-Cooper form of the shared-beam SINR-sum maximization for powers p:
/// maximize Tr(Qbar X) s.t. sigma_r^2 Tr(Gbar X) + sigma^2 t = 1,
/// Tr(Hbar X) <= t P_r, X >= 0, with t = X(N, N) (0-based) the augmented entry.
convex::SdpProblem build_cc_sdp(const std::vector<double>& p, const ChannelSet& ch, const Scenario& sc);

struct BeamResult {
    BeamVector v;
    /// sum_k p_k |h_d + v^H q_k|^2 / (sigma^2 + sigma_r^2 v^H G v) at v
    double sinr_sum = 0.0;
    bool rank_exact = true;
    /// Gaussian randomization supplied v
    bool randomized = false;
    SolveStatus status = SolveStatus::optimal;
};

/// sum_k p_k |h_d[k] + v^H q[k]|^2 / (sigma^2 + sigma_r^2 v^H G v)
double sinr_sum(const BeamVector& v, const std::vector<double>& p, const ChannelSet& ch, const Scenario& sc);

/// Optimal shared beam for fixed powers via the SDP above. All-zero powers give v = 0.
BeamResult beamforming_step(const std::vector<double>& p, const ChannelSet& ch, const Scenario& sc,
                            const SolverOptions& opts = {});

/// Powers maximizing the received SINR sum for fixed v (continuous knapsack).
/// Throws SolverError(infeasible) if sigma_r^2 ||v||^2 exceeds P_r.
std::vector<double> power_step(const BeamVector& v, const ChannelSet& ch, const Scenario& sc);

struct NomaSolution {
    double tau = 0.0;
    std::vector<double> p;
    BeamVector v;
    double objective = 0.0;
    std::vector<double> ao_trace;
    bool sdp_rank_exact = true;
    int iterations = 0;
    SolveStatus status = SolveStatus::optimal;
    /// Amplification power minus P_r (<= 0 when feasible).
    double residual = 0.0;
};

/// Alternates power_step and beamforming_step with tau fixed at T_max.
NomaSolution solve_noma(const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts = {});

/// T_max log2(1 + sum_k p_k |h_d + v^H q_k|^2 / (sigma^2 + sigma_r^2 v^H G v)) with sol.tau as duration.
double noma_throughput(const NomaSolution& sol, const ChannelSet& ch, const Scenario& sc);

} // namespace airs::noma
