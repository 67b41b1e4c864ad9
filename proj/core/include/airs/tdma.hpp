// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <vector>

#include "airs/channel.hpp"
#include "airs/options.hpp"
#include "airs/scenario.hpp"
#include "airs/types.hpp"

namespace airs::tdma {

/// First-order lower bound of energy * |h_d + v^H q|^2 / S around (v_ref, S_ref):
///   constant + sum_n (re_coef[n] Re v_n + im_coef[n] Im v_n) + s_coef * S.
/// Exact at the expansion point and below the true function everywhere.
struct ScaBound {
    double constant = 0.0;
    VectorXd re_coef;
    VectorXd im_coef;
    double s_coef = 0.0;

    double eval(const BeamVector& v, double S) const;
};

/// Throws std::domain_error for S_ref <= 0.
ScaBound sca_bound(const BeamVector& v_ref, double S_ref, int k, const ChannelSet& ch, double energy);

struct TdmaSolution {
    std::vector<double> tau;
    std::vector<double> p;
    /// energy * |h_d + v^H q|^2 / (sigma^2 + sigma_r^2 v^H G v) at the returned point
    std::vector<double> S;
    std::vector<BeamVector> v;
    double objective = 0.0;
    std::vector<double> trace;
    /// max of (amplification power - P_r) over devices and sum(tau) - T_max
    double residual = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::optimal;
    bool shared_beam = false;
    /// unit-modulus reflection, no amplifier noise
    bool passive = false;
};

/// One beam per slot; SCA on the energy-depleting reformulation, best of
/// opts.restarts starts (phase-aligned first, then seeded random phases).
TdmaSolution solve_tdma(const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts = {});

/// One beam shared by all slots; alternates the (tau, e) step with an SCA beam step.
TdmaSolution solve_tdma_single_beam(const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts = {});

/// sum_k tau_k log2(1 + p_k |h_d + v_k^H q_k|^2 / (sigma^2 + sigma_r^2 v_k^H G v_k));
/// sigma_r^2 is taken as 0 for passive solutions.
double tdma_throughput(const TdmaSolution& sol, const ChannelSet& ch, const Scenario& sc);

/// Rows (k, tau, p, S).
void write_solution_csv(std::ostream& os, const TdmaSolution& sol);
/// Rows (slot, n, re, im).
void write_beams_csv(std::ostream& os, const std::vector<BeamVector>& beams);

} // namespace airs::tdma
