// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>

namespace sis {

/// Parameters of the stochastic SIS model
///
///   dI = [eta I - beta I^2] dt + sigma I (N - I) dB,   eta = beta N - mu - gamma,
///
/// together with the initial infected count. Rates are per day, N and I0 in
/// individuals.
struct SisParams {
    double beta = 0.0;
    double mu = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;
    double cap_n = 1.0;
    double i0 = 0.5;

    /// Throws InvalidParams naming the first violated invariant.
    void validate() const;

    [[nodiscard]] double eta() const noexcept { return beta * cap_n - mu - gamma; }
    [[nodiscard]] double removal_rate() const noexcept { return mu + gamma; }
    [[nodiscard]] double diffusion() const noexcept { return sigma * cap_n; }
};

enum class Regime { ExtinctSmallNoise, ExtinctLargeNoise, Unclassified };

[[nodiscard]] std::string_view to_string(Regime regime) noexcept;

/// Scalars derived from SisParams. Reproduction numbers are absent when
/// mu + gamma == 0; ext_bound_b is absent when sigma == 0.
struct DerivedQuantities {
    double eta = 0.0;
    std::optional<double> r0_det;
    std::optional<double> r0_stoch;
    double ext_bound_a = 0.0;
    std::optional<double> ext_bound_b;
    Regime regime = Regime::Unclassified;
};

/// Computes every derived quantity and classifies the extinction regime.
/// The small-noise condition (R0s < 1 and sigma^2 <= beta/N) is tested first,
/// then the large-noise one (sigma^2 > max(beta/N, beta^2 / (2(mu+gamma)))).
[[nodiscard]] DerivedQuantities derive(const SisParams& params);

/// Per-capita growth rate of log I along the numerical path,
/// g(x) = beta N - mu - gamma - beta x - sigma^2 (N - x)^2 / 2.
[[nodiscard]] double log_growth_rate(const SisParams& params, double x) noexcept;

/// Maximiser of log_growth_rate, (sigma^2 N - beta) / sigma^2. Absent when sigma == 0.
[[nodiscard]] std::optional<double> log_growth_argmax(const SisParams& params) noexcept;

struct MomentConstant {
    double value = 1.0;      // +inf when saturated
    double log_value = 0.0;  // always finite for finite inputs
    bool saturated = false;
};

/// Bound on sup_t E[I^-p] and sup_t E[(N-I)^-p] over [0, t_final]:
///   (I0^-p v (N-I0)^-p) exp(p T (|beta N - mu - gamma| + 2 beta N) + p (p+1) sigma^2 N^2 T / 2).
/// Accumulated in log space; saturates instead of overflowing.
[[nodiscard]] MomentConstant moment_constant_kp(const SisParams& params, double p, double t_final);

}  // namespace sis
