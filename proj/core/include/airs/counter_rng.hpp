// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace airs {

/// Counter-based generator: draw i of stream `key` is mix(key, i), so any
/// substream can be addressed without advancing a shared state. The mixing
/// function is the SplitMix64 finalizer applied to a key/counter combination.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    /// Derives a substream key from a parent key and a list of coordinates.
    static std::uint64_t derive(std::uint64_t parent, std::initializer_list<std::uint64_t> coords) {
        std::uint64_t h = mix(parent ^ 0x9e3779b97f4a7c15ULL);
        for (auto c : coords) h = mix(h ^ mix(c + 0x632be59bd9b4e019ULL));
        return h;
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * (++counter_)); }

    /// Uniform in (0, 1), never exactly 0.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Box-Muller; one draw consumes two uniforms.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Circularly-symmetric CN(0, 1).
    std::complex<double> complex_normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }

    std::uint64_t counter() const { return counter_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace airs
