// SPDX-License-Identifier: Apache-2.0
#include "sis/paths.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "sis/errors.hpp"

namespace sis {

namespace {

std::optional<double> snapped_ratio(double horizon, double dt) {
    const double q = horizon / dt;
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, r)) {
        return r;
    }
    return std::nullopt;
}

void check_step(double horizon, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("step size must be finite and > 0");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ConfigError("horizon must be finite and > 0");
    }
}

BrownianGrid fill(std::uint64_t seed, std::uint64_t path_index, std::optional<int> exponent, double dt,
                  double horizon, std::size_t max_stored) {
    check_step(horizon, dt);
    const std::size_t count = covering_steps(horizon, dt);
    if (count > max_stored) {
        throw CapacityError("grid needs " + std::to_string(count) + " increments, budget is " +
                            std::to_string(max_stored) + "; use BrownianStream");
    }
    BrownianGrid grid;
    grid.seed = seed;
    grid.path_index = path_index;
    grid.fine_exponent = exponent;
    grid.fine_dt = dt;
    grid.horizon = horizon;
    grid.increments.resize(count);
    const BrownianStream stream(seed, path_index, dt);
    for (std::size_t k = 0; k < count; ++k) {
        grid.increments[k] = stream.increment(k);
    }
    return grid;
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    }
    out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) {
        throw IoError("increment dump truncated");
    }
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | bytes[i];
    }
    return v;
}

constexpr char kDumpMagic[8] = {'S', 'I', 'S', 'B', 'M', '0', '0', '1'};

}  // namespace

std::size_t whole_steps(double horizon, double dt) {
    check_step(horizon, dt);
    if (const auto r = snapped_ratio(horizon, dt)) {
        return static_cast<std::size_t>(*r);
    }
    return static_cast<std::size_t>(std::floor(horizon / dt));
}

std::size_t covering_steps(double horizon, double dt) {
    check_step(horizon, dt);
    if (const auto r = snapped_ratio(horizon, dt)) {
        return static_cast<std::size_t>(*r);
    }
    return static_cast<std::size_t>(std::ceil(horizon / dt));
}

double dyadic_step(int exponent) { return std::ldexp(1.0, -exponent); }

BrownianStream::BrownianStream(std::uint64_t seed, std::uint64_t path_index, double fine_dt) noexcept
    : normals_(seed, path_index), fine_dt_(fine_dt), scale_(std::sqrt(fine_dt)) {}

double BrownianStream::aggregated(std::uint64_t k, std::uint64_t ratio) const noexcept {
    const std::uint64_t first = k * ratio;
    double sum = increment(first);
    for (std::uint64_t j = 1; j < ratio; ++j) {
        sum += increment(first + j);
    }
    return sum;
}

BrownianGrid generate(std::uint64_t seed, std::uint64_t path_index, int fine_exponent, double horizon,
                      std::size_t max_stored) {
    if (fine_exponent < 0 || fine_exponent > 60) {
        throw ConfigError("fine exponent must lie in [0, 60]");
    }
    return fill(seed, path_index, fine_exponent, dyadic_step(fine_exponent), horizon, max_stored);
}

BrownianGrid generate_with_step(std::uint64_t seed, std::uint64_t path_index, double dt, double horizon,
                                std::size_t max_stored) {
    return fill(seed, path_index, std::nullopt, dt, horizon, max_stored);
}

std::vector<double> aggregate(std::span<const double> fine, std::size_t ratio) {
    if (ratio == 0) {
        throw ExponentError("aggregation ratio must be positive");
    }
    std::vector<double> coarse(fine.size() / ratio);
    for (std::size_t m = 0; m < coarse.size(); ++m) {
        const std::size_t first = m * ratio;
        double sum = fine[first];
        for (std::size_t j = 1; j < ratio; ++j) {
            sum += fine[first + j];
        }
        coarse[m] = sum;
    }
    return coarse;
}

std::vector<double> coarsen(const BrownianGrid& grid, int coarse_exponent) {
    if (!grid.fine_exponent) {
        throw ExponentError("grid has no dyadic exponent; cannot coarsen");
    }
    if (coarse_exponent > *grid.fine_exponent) {
        throw ExponentError("coarse exponent " + std::to_string(coarse_exponent) + " exceeds fine exponent " +
                            std::to_string(*grid.fine_exponent));
    }
    if (coarse_exponent < 0) {
        throw ExponentError("coarse exponent must be >= 0");
    }
    return aggregate(grid.increments, std::size_t{1} << (*grid.fine_exponent - coarse_exponent));
}

void write_increment_dump(const std::filesystem::path& file, const BrownianGrid& grid) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + file.string() + " for writing");
    }
    out.write(kDumpMagic, sizeof kDumpMagic);
    put_u64(out, grid.seed);
    put_u64(out, grid.path_index);
    put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(grid.fine_exponent.value_or(-1))));
    put_u64(out, std::bit_cast<std::uint64_t>(grid.horizon));
    put_u64(out, std::bit_cast<std::uint64_t>(grid.fine_dt));
    put_u64(out, grid.increments.size());
    for (const double v : grid.increments) {
        put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    if (!out) {
        throw IoError("write failed for " + file.string());
    }
}

BrownianGrid read_increment_dump(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + file.string());
    }
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kDumpMagic, sizeof magic) != 0) {
        throw IoError(file.string() + " is not an increment dump");
    }
    BrownianGrid grid;
    grid.seed = get_u64(in);
    grid.path_index = get_u64(in);
    const auto exponent = static_cast<std::int64_t>(get_u64(in));
    if (exponent >= 0) {
        grid.fine_exponent = static_cast<int>(exponent);
    }
    grid.horizon = std::bit_cast<double>(get_u64(in));
    grid.fine_dt = std::bit_cast<double>(get_u64(in));
    const std::uint64_t count = get_u64(in);
    grid.increments.resize(count);
    for (auto& v : grid.increments) {
        v = std::bit_cast<double>(get_u64(in));
    }
    return grid;
}

}  // namespace sis
