#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace scenv {

// Philox 4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
// pure function of (key, counter), so sample i of a run never depends on how
// many draws earlier samples consumed. Streams are addressed as
//   counter = (block, attempt, sample_index, stream_id), key = seed.
namespace philox {

inline constexpr std::uint32_t kM0 = 0xD2511F53u;
inline constexpr std::uint32_t kM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
    std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    std::array<std::uint32_t, 4> out;
    out[0] = static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0];
    out[1] = static_cast<std::uint32_t>(p1);
    out[2] = static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1];
    out[3] = static_cast<std::uint32_t>(p0);
    ctr = out;
    key[0] += kW0;
    key[1] += kW1;
}

inline std::array<std::uint32_t, 4> block(std::uint64_t seed, std::array<std::uint32_t, 4> ctr) {
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                        static_cast<std::uint32_t>(seed >> 32)};
    for (int r = 0; r < 10; ++r) round_once(ctr, key);
    return ctr;
}

} // namespace philox

// One independent random stream identified by (seed, sample, attempt, id).
// Yields doubles strictly inside (0,1).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t sample_index, std::uint32_t attempt,
              std::uint32_t stream_id)
        : seed_(seed) {
        base_[1] = attempt;
        base_[2] = static_cast<std::uint32_t>(sample_index) ^
                   static_cast<std::uint32_t>(sample_index >> 32) * 0x9E3779B9u;
        base_[3] = stream_id;
    }

    double next_unit() {
        std::uint64_t bits = next_u64();
        // 53 mantissa bits centered on the lattice: never exactly 0 or 1.
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t next_u64() {
        if (have_ == 0) {
            auto ctr = base_;
            ctr[0] = block_index_++;
            buf_ = philox::block(seed_, ctr);
            have_ = 2;
        }
        --have_;
        std::uint64_t hi = buf_[2 * have_];
        std::uint64_t lo = buf_[2 * have_ + 1];
        return (hi << 32) | lo;
    }

    // Marsaglia polar-free Box-Muller; consumes two uniforms.
    double next_normal() {
        if (have_normal_) {
            have_normal_ = false;
            return cached_normal_;
        }
        double u1 = next_unit(), u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

    // Marsaglia-Tsang for shape >= 1, boosted for shape < 1. Scale 1.
    double next_gamma(double shape) {
        if (shape < 1.0) {
            double u = next_unit();
            return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = next_normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = next_unit();
            if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::uint64_t seed_;
    std::array<std::uint32_t, 4> base_ = {0, 0, 0, 0};
    std::array<std::uint32_t, 4> buf_ = {0, 0, 0, 0};
    std::uint32_t block_index_ = 0;
    int have_ = 0;
    bool have_normal_ = false;
    double cached_normal_ = 0.0;
};

} // namespace scenv
