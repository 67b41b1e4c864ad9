// SPDX-License-Identifier: Apache-2.0
#include "airs/channel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "airs/counter_rng.hpp"

namespace airs {

namespace {

enum Link : std::uint64_t { kPosition = 0, kIrsAp = 1, kDeviceIrs = 2, kDeviceAp = 3 };

} // namespace

double path_loss(double d, double exponent, double ref_loss_db) {
    if (!(d >= 1.0))
        throw std::domain_error("path_loss: distance " + std::to_string(d) +
                                " m is below the 1 m reference distance");
    return std::pow(10.0, -ref_loss_db / 10.0) * std::pow(d, -exponent);
}

double distance(const Point3& a, const Point3& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void ChannelSet::derive() {
    const auto n = g.size();
    G_diag = g.cwiseAbs2();
    q.resize(h_r.size());
    Hr_diag.resize(h_r.size());
    for (std::size_t k = 0; k < h_r.size(); ++k) {
        if (h_r[k].size() != n) throw std::invalid_argument("ChannelSet: h_r dimension mismatch");
        q[k] = g.conjugate().cwiseProduct(h_r[k]);
        Hr_diag[k] = h_r[k].cwiseAbs2();
    }
}

ChannelSet ChannelSet::select(const std::vector<int>& devices) const {
    ChannelSet out;
    out.g = g;
    out.G_diag = G_diag;
    for (int k : devices) {
        if (k < 0 || k >= K()) throw std::out_of_range("ChannelSet::select: bad device index");
        out.h_r.push_back(h_r[k]);
        out.h_d.push_back(h_d[k]);
        out.q.push_back(q[k]);
        out.Hr_diag.push_back(Hr_diag[k]);
        if (!device_pos.empty()) out.device_pos.push_back(device_pos[k]);
    }
    return out;
}

ChannelSet generate_channels(const Scenario& sc, std::uint64_t seed) {
    sc.validate();
    ChannelSet ch;
    const int K = sc.K, N = sc.N;

    const double pl_irs_ap = path_loss(distance(sc.irs_pos, sc.ap_pos), sc.alpha_ris, sc.ref_loss_db);
    ch.g.resize(N);
    for (int n = 0; n < N; ++n) {
        CounterRng rng(CounterRng::derive(seed, {kIrsAp, 0, static_cast<std::uint64_t>(n)}));
        ch.g[n] = std::sqrt(pl_irs_ap) * rng.complex_normal();
    }

    ch.h_r.resize(K);
    ch.h_d.resize(K);
    ch.device_pos.resize(K);
    for (int k = 0; k < K; ++k) {
        const auto uk = static_cast<std::uint64_t>(k);
        CounterRng pos_rng(CounterRng::derive(seed, {kPosition, uk}));
        // inverse-CDF radius keeps the density uniform over the disk
        const double r = sc.device_radius * std::sqrt(pos_rng.uniform());
        const double th = 2.0 * std::numbers::pi * pos_rng.uniform();
        Point3 p = sc.device_center;
        p[0] += r * std::cos(th);
        p[1] += r * std::sin(th);
        ch.device_pos[k] = p;

        const double pl_r = path_loss(distance(p, sc.irs_pos), sc.alpha_ris, sc.ref_loss_db);
        const double pl_d = path_loss(distance(p, sc.ap_pos), sc.alpha_direct, sc.ref_loss_db);

        ch.h_r[k].resize(N);
        for (int n = 0; n < N; ++n) {
            CounterRng rng(CounterRng::derive(seed, {kDeviceIrs, uk, static_cast<std::uint64_t>(n)}));
            ch.h_r[k][n] = std::sqrt(pl_r) * rng.complex_normal();
        }
        CounterRng rng(CounterRng::derive(seed, {kDeviceAp, uk}));
        ch.h_d[k] = std::sqrt(pl_d) * rng.complex_normal();
    }
    ch.derive();
    return ch;
}

cdouble cascaded(const BeamVector& v, int k, const ChannelSet& ch) {
    if (v.size() != ch.N()) throw std::invalid_argument("beam vector length does not match N");
    return ch.h_d[k] + v.dot(ch.q[k]);
}

EffectiveGain effective_gain(const BeamVector& v, int k, const ChannelSet& ch) {
    return {std::norm(cascaded(v, k, ch)), v.cwiseAbs2().dot(ch.G_diag)};
}

double incident_power_gain(const BeamVector& v, int k, const ChannelSet& ch) {
    if (v.size() != ch.N()) throw std::invalid_argument("beam vector length does not match N");
    return v.cwiseAbs2().dot(ch.Hr_diag[k]);
}

double amplification_power(const BeamVector& v, const std::vector<int>& devices,
                           const std::vector<double>& powers, const ChannelSet& ch,
                           double sigma_r2) {
    if (devices.size() != powers.size()) throw std::invalid_argument("amplification_power: size mismatch");
    double total = sigma_r2 * v.squaredNorm();
    for (std::size_t i = 0; i < devices.size(); ++i)
        total += powers[i] * incident_power_gain(v, devices[i], ch);
    return total;
}

void write_channels_csv(std::ostream& os, const ChannelSet& ch) {
    auto row = [&os](const char* link, int k, int n, cdouble z) {
        os << link << ',' << k << ',' << n << ',' << z.real() << ',' << z.imag() << '\n';
    };
    const auto old_prec = os.precision(17);
    os << "link,k,n,re,im\n";
    for (int n = 0; n < ch.N(); ++n) row("g", -1, n, ch.g[n]);
    for (int k = 0; k < ch.K(); ++k) {
        for (int n = 0; n < ch.N(); ++n) row("h_r", k, n, ch.h_r[k][n]);
        row("h_d", k, -1, ch.h_d[k]);
        for (int n = 0; n < ch.N(); ++n) row("q", k, n, ch.q[k][n]);
    }
    os.precision(old_prec);
}

BeamVector phase_aligned(int k, const ChannelSet& ch) {
    const double ref = std::arg(ch.h_d[k]);
    BeamVector v(ch.N());
    // v_n^* q_n has phase arg(q_n) - arg(v_n); set it to arg(h_d)
    for (int n = 0; n < ch.N(); ++n) v[n] = std::polar(1.0, std::arg(ch.q[k][n]) - ref);
    return v;
}

double scale_search(const std::function<double(double)>& f, double s_max) {
    if (!(s_max > 0.0)) throw std::invalid_argument("scale_search: s_max must be positive");
    constexpr int samples = 49;
    const double lo = std::log(s_max) - 6.0 * std::log(10.0), hi = std::log(s_max);
    auto at = [&](int i) { return lo + (hi - lo) * i / (samples - 1); };
    int best = samples - 1;
    double best_val = f(s_max);
    for (int i = samples - 2; i >= 0; --i) {
        const double val = f(std::exp(at(i)));
        if (val > best_val) {
            best_val = val;
            best = i;
        }
    }
    double a = at(std::max(best - 1, 0)), b = at(std::min(best + 1, samples - 1));
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
    for (int it = 0; it < 40; ++it) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(std::exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(std::exp(x2));
        }
    }
    const double x = f1 >= f2 ? x1 : x2;
    return std::max(f1, f2) > best_val ? std::exp(x) : std::exp(at(best));
}

double snr(const BeamVector& v, int k, double p, const ChannelSet& ch, double sigma2, double sigma_r2) {
    const EffectiveGain eg = effective_gain(v, k, ch);
    return p * eg.signal / (sigma2 + sigma_r2 * eg.irs_noise);
}

} // namespace airs
