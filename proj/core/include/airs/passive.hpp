// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "airs/tdma.hpp"

namespace airs {

/// Simplified passive-surface reference: TDMA SCA with |v_n| <= 1 and no
/// amplifier noise, phases then projected to |v_n| = 1 and slot times
/// re-optimized in closed form. Not a reproduction of any published passive
/// algorithm.
tdma::TdmaSolution solve_passive_baseline(const ChannelSet& ch, const Scenario& sc, const SolverOptions& opts = {});

} // namespace airs
