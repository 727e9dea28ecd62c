// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sis/model.hpp"

namespace sis {

/// State of the log-odds transformed process y = log(I / (N - I)).
struct YState {
    double value = 0.0;

    constexpr YState() = default;
    constexpr explicit YState(double v) : value(v) {}

    friend constexpr bool operator==(YState, YState) = default;
};

/// Logistic sigmoid 1 / (1 + e^-x), evaluated without overflow for any finite x.
[[nodiscard]] double logistic(double x) noexcept;

/// y = log(i) - log(N - i). Throws DomainError unless 0 < i < N.
[[nodiscard]] YState forward(double i, const SisParams& params);

/// I = N e^y / (1 + e^y). Total on finite y; the result may saturate to
/// exactly 0 or N in floating point (see is_boundary_saturated).
[[nodiscard]] double inverse(YState y, const SisParams& params) noexcept;

/// log I for I = inverse(y), computed without forming I (no underflow).
[[nodiscard]] double log_infected(YState y, const SisParams& params) noexcept;

/// True when an I-space value sits on (or outside) the boundary of (0, N).
[[nodiscard]] bool is_boundary_saturated(double i, const SisParams& params) noexcept;

/// Drift of the transformed SDE dy = F(y) dt + sigma N dB:
///   F(y) = eta - (mu + gamma) e^y + sigma^2 N^2 / 2 - sigma^2 N^2 / (1 + e^y).
/// Throws OverflowError when (mu + gamma) e^y is not representable.
[[nodiscard]] double drift_f(YState y, const SisParams& params);

}  // namespace sis
