// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "airs/tdma.hpp"

namespace airs::tdma::detail {

/// Separate-beam SCA from the given per-device beams and tau_k = T/K.
/// `passive` swaps the amplification budget for |v_n| <= 1 and drops sigma_r^2.
TdmaSolution run_sca(const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts,
                     std::vector<BeamVector> v0, bool passive);

} // namespace airs::tdma::detail
