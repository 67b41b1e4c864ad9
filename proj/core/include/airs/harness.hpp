// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "airs/channel.hpp"
#include "airs/hybrid.hpp"
#include "airs/options.hpp"
#include "airs/scenario.hpp"

namespace airs::harness {

enum class SchemeKind { tdma, tdma_single, noma, hybrid, passive };

/// Accepts tdma, tdma_single, noma, hybrid, passive.
SchemeKind parse_scheme(const std::string& name);
/// Output label; the passive baseline is reported as "passive_simplified".
const char* to_string(SchemeKind s);

struct SweepConfig {
    Scenario base = preset("paper-v");
    /// K, N, E, P_r, P_r_dbm, x_d, x_irs or L
    std::string axis = "K";
    std::vector<double> values;
    int seeds = 20;
    std::uint64_t seed_base = 1;
    std::vector<SchemeKind> schemes{SchemeKind::tdma, SchemeKind::noma};
    /// group counts for the hybrid scheme (ignored by the others unless axis == L)
    std::vector<int> L_values{2};
    hybrid::GroupingStrategy grouping = hybrid::GroupingStrategy::round_robin;
    int workers = 1;
    std::string output;
    /// false writes 0 in the wall_time column so reruns are byte-identical
    bool record_timing = true;
    SolverOptions opts;

    void validate() const;
    /// Scenario at one axis value (L leaves the scenario unchanged).
    Scenario scenario_at(double value) const;
};

/// INI text with [scenario], [sweep] and [solver] sections.
SweepConfig parse_sweep_config(std::istream& is);
SweepConfig load_sweep_config(const std::string& path);
/// Resolved configuration as pretty-printed JSON.
std::string config_json(const SweepConfig& cfg);

struct RunRecord {
    std::uint64_t scenario_hash = 0;
    std::string axis;
    double axis_value = 0.0;
    std::uint64_t seed = 0;
    std::string scheme;
    int L = 0;
    double objective = 0.0;
    int iterations = 0;
    double wall_time = 0.0;
    long overhead = 0;
    /// ';'-separated: rank_fallback, status names, skipped_slot, error:<what>
    std::string flags;
};

/// One scheme on one channel draw. Solver failures come back as flags.
RunRecord solve_point(const Scenario& sc, std::uint64_t seed, SchemeKind scheme, int L,
                      hybrid::GroupingStrategy grouping, const SolverOptions& opts);

/// Every (axis value, seed, scheme, L) point in config order; `workers` points run concurrently.
std::vector<RunRecord> run_sweep(const SweepConfig& cfg);

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records);

struct CompareRow {
    std::string scheme;
    int L = 0;
    double objective = 0.0;
    long overhead = 0;
};

/// TDMA, NOMA and hybrid for every L on one channel draw.
std::vector<CompareRow> compare_schemes(const ChannelSet& ch, const Scenario& sc, const std::vector<int>& L_values,
                                        hybrid::GroupingStrategy grouping = hybrid::GroupingStrategy::round_robin,
                                        const SolverOptions& opts = {});

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows);

struct VerifyRecord {
    std::string check;
    std::uint64_t seed = 0;
    double value = 0.0;
    double reference = 0.0;
    bool pass = false;
};

/// Oracle and invariant checks on tiny (K = 2, N = 2) instances, seeds 1..instances.
std::vector<VerifyRecord> run_verify(int instances, int workers, const SolverOptions& opts = {});

void write_verify_csv(std::ostream& os, const std::vector<VerifyRecord>& records);

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

} // namespace airs::harness
