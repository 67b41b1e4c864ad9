// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "airs/channel.hpp"
#include "airs/noma.hpp"
#include "airs/options.hpp"
#include "airs/scenario.hpp"
#include "airs/types.hpp"

namespace airs::hybrid {

/// L disjoint device groups covering 0..K-1; group l transmits in slot l.
struct Grouping {
    int L = 0;
    std::vector<std::vector<int>> groups;

    int K() const;
    /// Throws std::invalid_argument unless disjoint and covering 0..K-1.
    void validate(int K) const;
    /// "0 2|1 3"
    std::string to_string() const;
    static Grouping parse(const std::string& text);
};

enum class GroupingStrategy { round_robin, random, exhaust_best, exhaust_worst };

GroupingStrategy parse_strategy(const std::string& name);
const char* to_string(GroupingStrategy s);

/// Sizes ceil(K/L) for the first K mod L groups and floor(K/L) for the rest.
/// round_robin: device k joins group k mod L. random: seeded shuffle, then round robin.
/// The exhaustive strategies need channels; use the overload below.
Grouping partition_devices(int K, int L, GroupingStrategy strategy, std::uint64_t seed = 0);

/// Exhaustive strategies enumerate every balanced partition (K <= 8) and score
/// each with solve_hybrid; the others ignore ch/sc/opts.
Grouping partition_devices(const ChannelSet& ch, const Scenario& sc, int L, GroupingStrategy strategy,
                           std::uint64_t seed = 0, const SolverOptions& opts = {});

/// Every balanced partition of 0..K-1 into L groups, each listed once.
std::vector<Grouping> balanced_partitions(int K, int L);

struct TimeEnergy {
    std::vector<double> tau;  // per group
    std::vector<double> e;    // per device
    double objective = 0.0;
    SolveStatus status = SolveStatus::optimal;
};

/// Slot durations and per-device energies for fixed per-group beams (convex).
/// `start`, if given, must be strictly feasible; otherwise one is constructed.
TimeEnergy time_energy_step(const std::vector<BeamVector>& v, const Grouping& grouping, const ChannelSet& ch,
                            const Scenario& sc, const SolverOptions& opts = {}, const TimeEnergy* start = nullptr);

/// Beam of group l for fixed (tau, e). A slot at or below the time floor gets v = 0
/// with status infeasible.
noma::BeamResult group_beamforming_step(const TimeEnergy& te, int l, const Grouping& grouping,
                                        const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts = {});

struct HybridSolution {
    Grouping grouping;
    std::vector<double> tau;
    std::vector<double> e;
    std::vector<double> p;
    std::vector<BeamVector> v;
    double objective = 0.0;
    std::vector<double> ao_trace;
    bool sdp_rank_exact = true;
    int skipped_slots = 0;
    int iterations = 0;
    SolveStatus status = SolveStatus::optimal;
    /// max over groups of (amplification power - P_r), and of sum(tau) - T_max
    double residual = 0.0;
};

HybridSolution solve_hybrid(const ChannelSet& ch, const Scenario& sc, const Grouping& grouping,
                            const SolverOptions& opts = {});

/// sum_l tau_l log2(1 + sum_{k in l} e_k |h_d + v_l^H q_k|^2 / (tau_l (sigma^2 + sigma_r^2 v_l^H G v_l)))
double hybrid_throughput(const HybridSolution& sol, const ChannelSet& ch, const Scenario& sc);

/// Beam coefficients the AP sends to the IRS controller per frame: L * N.
long signaling_overhead(const Grouping& grouping, int N);

} // namespace airs::hybrid
