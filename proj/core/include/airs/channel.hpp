// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "airs/scenario.hpp"
#include "airs/types.hpp"

namespace airs {

/// One channel realization plus the derived per-element quantities used by the
/// solvers: q_k = diag(g^H) h_{r,k}, G = diag(|g|^2), H_{r,k} = diag(|h_{r,k}|^2).
struct ChannelSet {
    VectorXcd g;                    // IRS -> AP, N
    std::vector<VectorXcd> h_r;     // device k -> IRS, K x N
    std::vector<cdouble> h_d;       // device k -> AP
    std::vector<VectorXcd> q;       // conj(g) .* h_r[k]
    VectorXd G_diag;                // |g|^2
    std::vector<VectorXd> Hr_diag;  // |h_r[k]|^2
    std::vector<Point3> device_pos;

    int K() const { return static_cast<int>(h_d.size()); }
    int N() const { return static_cast<int>(g.size()); }

    /// Recomputes q, G_diag and Hr_diag from g, h_r.
    void derive();
    /// Subset of devices in the given order (derived fields carried over).
    ChannelSet select(const std::vector<int>& devices) const;
};

/// 10^(-ref_loss_db/10) * d^(-exponent); throws std::domain_error for d < 1 m.
double path_loss(double distance, double exponent, double ref_loss_db);

double distance(const Point3& a, const Point3& b);

/// Rayleigh channels with distance-dependent path loss. Device k's position and
/// links come from substreams keyed by (seed, link, k, n) so adding devices or
/// elements never changes the draws of the existing ones.
ChannelSet generate_channels(const Scenario& sc, std::uint64_t seed);

struct EffectiveGain {
    double signal;     // |h_d[k] + v^H q[k]|^2
    double irs_noise;  // sum_n |v_n|^2 |g_n|^2
};

EffectiveGain effective_gain(const BeamVector& v, int k, const ChannelSet& ch);

/// h_d[k] + v^H q[k]
cdouble cascaded(const BeamVector& v, int k, const ChannelSet& ch);

/// v^H diag(Hr_diag[k]) v
double incident_power_gain(const BeamVector& v, int k, const ChannelSet& ch);

/// E||y_r||^2 for a set of simultaneously-transmitting devices:
/// sum_k p_k v^H H_{r,k} v + sigma_r^2 ||v||^2.
double amplification_power(const BeamVector& v, const std::vector<int>& devices,
                           const std::vector<double>& powers, const ChannelSet& ch,
                           double sigma_r2);

/// CSV rows (link, k, n, re, im); link in {g, h_r, h_d, q}.
void write_channels_csv(std::ostream& os, const ChannelSet& ch);

/// Phase-aligned direction for device k: arg(v_n^* q_n) = arg(h_d), unit modulus.
BeamVector phase_aligned(int k, const ChannelSet& ch);

/// Approximate maximizer of f over [1e-6 s_max, s_max]: log-spaced scan, then
/// golden-section refinement around the best sample. Used to size start beams,
/// since past a finite amplitude the IRS noise outgrows the cascaded gain.
double scale_search(const std::function<double(double)>& f, double s_max);

/// Signal-to-noise of device k at transmit power p through beam v.
double snr(const BeamVector& v, int k, double p, const ChannelSet& ch, double sigma2, double sigma_r2);

} // namespace airs
