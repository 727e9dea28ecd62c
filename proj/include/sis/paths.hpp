// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "sis/rng.hpp"

namespace sis {

/// Number of whole steps of size dt in [0, horizon]: floor(horizon / dt),
/// snapping ratios within 1e-9 of an integer to that integer.
[[nodiscard]] std::size_t whole_steps(double horizon, double dt);

/// Number of stored increments needed to cover [0, horizon]: ceil(horizon / dt)
/// with the same near-integer snapping.
[[nodiscard]] std::size_t covering_steps(double horizon, double dt);

/// 2^-exponent as an exact double.
[[nodiscard]] double dyadic_step(int exponent);

/// Default cap on stored increments per grid (2^27 doubles, 1 GiB).
inline constexpr std::size_t kDefaultMaxStoredIncrements = std::size_t{1} << 27;

/// Brownian increments dB_k = B(t_{k+1}) - B(t_k) on a uniform grid, fully
/// determined by (seed, path_index, step, horizon). Dyadic grids carry their
/// exponent L (step 2^-L) and can be coarsened to any level <= L.
struct BrownianGrid {
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    std::optional<int> fine_exponent;
    double fine_dt = 1.0;
    double horizon = 0.0;
    std::vector<double> increments;
};

/// Streaming access to the same increments a BrownianGrid would store.
/// increment(k) is identical bitwise to generate(...).increments[k].
class BrownianStream {
public:
    BrownianStream(std::uint64_t seed, std::uint64_t path_index, double fine_dt) noexcept;

    [[nodiscard]] double increment(std::uint64_t k) const noexcept { return scale_ * normals_(k); }

    /// Sum of the `ratio` fine increments starting at k * ratio, left to right.
    [[nodiscard]] double aggregated(std::uint64_t k, std::uint64_t ratio) const noexcept;

    [[nodiscard]] double fine_dt() const noexcept { return fine_dt_; }

private:
    rng::NormalStream normals_;
    double fine_dt_;
    double scale_;
};

/// Dyadic grid with step 2^-fine_exponent. Throws ConfigError on bad
/// arguments and CapacityError past max_stored.
[[nodiscard]] BrownianGrid generate(std::uint64_t seed, std::uint64_t path_index, int fine_exponent,
                                    double horizon,
                                    std::size_t max_stored = kDefaultMaxStoredIncrements);

/// Grid with an arbitrary step dt > 0 (not coarsenable).
[[nodiscard]] BrownianGrid generate_with_step(std::uint64_t seed, std::uint64_t path_index, double dt,
                                              double horizon,
                                              std::size_t max_stored = kDefaultMaxStoredIncrements);

/// Aggregates blocks of 2^(L - coarse_exponent) fine increments, summed left
/// to right. Trailing fine increments that do not fill a block are dropped.
/// Throws ExponentError when coarse_exponent > L or the grid is not dyadic.
[[nodiscard]] std::vector<double> coarsen(const BrownianGrid& grid, int coarse_exponent);

/// Same aggregation over a raw increment sequence.
[[nodiscard]] std::vector<double> aggregate(std::span<const double> fine, std::size_t ratio);

/// Debug dump: magic "SISBM001", then little-endian u64 seed, u64 path_index,
/// i64 fine exponent (-1 when not dyadic), f64 horizon, f64 fine_dt,
/// u64 count, count x f64 increments.
void write_increment_dump(const std::filesystem::path& file, const BrownianGrid& grid);
[[nodiscard]] BrownianGrid read_increment_dump(const std::filesystem::path& file);

}  // namespace sis
