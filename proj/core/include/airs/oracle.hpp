// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "airs/channel.hpp"
#include "airs/hybrid.hpp"
#include "airs/knapsack.hpp"
#include "airs/options.hpp"
#include "airs/scenario.hpp"
#include "airs/types.hpp"

namespace airs::oracle {

class GridTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct GridSpec {
    int phase_levels = 16;
    int amplitude_levels = 10;
    /// slot durations are multiples of T_max / time_levels
    int time_levels = 20;
    double max_points = 1e8;
    int workers = 1;
};

enum class Scheme { tdma, noma, hybrid };

struct GridOptimum {
    double objective = 0.0;
    std::vector<double> tau;        // per slot
    std::vector<double> p;          // per device
    std::vector<BeamVector> v;      // per slot
    double points = 0.0;            // grid points evaluated
};

/// Exhaustive search over per-slot beams (phase grid x amplitude scalings of
/// each unit-modulus pattern) and slot durations on a simplex grid. Powers
/// follow p = E/tau with the beam scaled to the budget (TDMA) or the knapsack
/// optimum for the beam (NOMA, hybrid groups). A feasible-point lower bound.
/// `grouping` is used only for Scheme::hybrid.
GridOptimum brute_force(const ChannelSet& ch, const Scenario& sc, Scheme scheme, const GridSpec& grid,
                        const hybrid::Grouping* grouping = nullptr);

/// Predicted point count for the guard (throws nothing).
double grid_points(const ChannelSet& ch, Scheme scheme, const GridSpec& grid, int slots);

struct LpOptimum {
    double objective = 0.0;
    VectorXd p;
};

/// Enumerates every basic point (each entry at 0 or its bound, at most one set
/// by the budget). K <= 16.
LpOptimum vertex_enumerate_lp(const convex::KnapsackLp& lp);

/// max over X >= 0 with X(N,N) = 1 and the amplification budget of the ratio
/// Tr(Qbar X) / (sigma_r^2 Tr(Gbar X) + sigma^2), by bisection on the ratio with
/// one SDP per probe. Returns the optimal SINR sum.
double fractional_sinr_bisection(const std::vector<double>& p, const ChannelSet& ch, const Scenario& sc,
                                 double rel_tol = 1e-7, const SolverOptions& opts = {});

struct EqualSnr {
    std::vector<double> tau;
    double objective = 0.0;
};

/// max sum tau_k log2(1 + snr_energy_k / tau_k) s.t. sum tau <= T in closed form:
/// tau_k = T snr_energy_k / sum, objective T log2(1 + sum / T).
EqualSnr equal_snr_allocation(const std::vector<double>& snr_energy, double T);

} // namespace airs::oracle
