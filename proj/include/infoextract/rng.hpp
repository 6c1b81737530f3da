#pragma once

#include <cstdint>

namespace infoextract::datasets {

/// SplitMix64: 64-bit counter-based generator. Fixed algorithm so seeded
/// outputs are reproducible across platforms and implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double strictly inside (0,1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    /// Standard normal via the inverse-CDF method.
    double next_normal() { return normal_quantile(next_unit()); }

    /// Rational approximation of the standard normal quantile
    /// (Wichura's PPND16 algorithm, absolute error < 1e-9).
    static double normal_quantile(double p);

private:
    std::uint64_t state_;
};

}  // namespace infoextract::datasets
