// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace sis::rng {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
/// Stateless: the same (counter, key) always yields the same block.
using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

[[nodiscard]] constexpr Counter philox4x32_10(Counter ctr, Key key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// Maps 64 random bits to the open interval (0, 1) using the top 52 bits;
/// (k + 1/2) 2^-52 is exact for every k, so neither endpoint is reachable.
[[nodiscard]] constexpr double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Inverse of the standard normal CDF, Wichura's AS 241 (PPND16).
/// Relative accuracy about 1e-16 on (0, 1).
[[nodiscard]] double normal_quantile(double p) noexcept;

/// Random-access stream of standard normals keyed by (seed, stream id).
/// Draw k is a pure function of (seed, stream, k): two normals are taken
/// from each Philox block, one per 64-bit half.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    [[nodiscard]] double operator()(std::uint64_t index) const noexcept {
        const std::uint64_t block = index >> 1;
        const Counter out = philox4x32_10(
            {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), stream_lo_,
             stream_hi_},
            key_);
        const std::size_t half = (index & 1u) * 2;
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(out[half]) << 32) | static_cast<std::uint64_t>(out[half + 1]);
        return normal_quantile(to_open_unit(bits));
    }

private:
    Key key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
};

}  // namespace sis::rng
