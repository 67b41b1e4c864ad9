// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace airs {

struct SolverOptions {
    // interior-point / barrier
    double tol_gap = 1e-9;
    int max_iter = 500;
    double barrier_growth = 10.0;
    double barrier_t0 = 1.0;
    double min_step = 1e-14;
    double ls_alpha = 0.25;
    double ls_beta = 0.5;

    // SDP
    double sdp_tol = 1e-10;
    int sdp_max_iter = 100;
    double rank_one_ratio = 1.0 - 1e-6;
    int randomization_samples = 200;

    // SCA (TDMA)
    double sca_tol = 1e-5;
    int sca_max_iter = 50;
    int restarts = 3;

    // AO (NOMA / hybrid / single-beam TDMA)
    double ao_tol = 1e-6;
    int ao_max_iter = 30;
    int inner_sca_max_iter = 10;
    /// Also start the NOMA AO from the single-beam TDMA beam.
    bool noma_single_beam_start = true;
    /// Also start the NOMA and hybrid AO from beams that serve one device alone.
    bool device_starts = true;

    /// tau_floor = time_floor_ratio * T_max
    double time_floor_ratio = 1e-9;

    /// Seeds restarts and Gaussian randomization.
    std::uint64_t seed = 0x5eed;

    /// Worker threads for per-group beamforming in the hybrid solver.
    int group_workers = 1;

    void validate() const;
};

} // namespace airs
