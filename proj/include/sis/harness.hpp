// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sis/model.hpp"
#include "sis/schemes.hpp"

namespace sis {

/// Runs fn(i) for i in [0, count) on `threads` workers (0 = hardware
/// concurrency). Work is handed out through a shared counter; callers write
/// into per-index slots so results do not depend on scheduling. The first
/// exception (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

/// Ordinary least squares through (x, y) points. Throws DegenerateFit for
/// fewer than two points or coincident abscissae.
[[nodiscard]] LineFit fit_slope(std::span<const std::pair<double, double>> points);

// ---------------------------------------------------------------------------
// Strong convergence

struct ConvergenceSetup {
    SchemeKind kind = SchemeKind::LogTEM;
    std::vector<int> step_exponents;
    int reference_exponent = 15;
    double p = 5.0;
    std::size_t m_paths = 200;
    double t_final = 1.0;
    std::uint64_t seed = 0;
    std::optional<double> cap_multiplier;
    unsigned threads = 0;
};

/// Desk preset: l in {6..12}, L_ref = 15, p = 5, M = 200, T = 1.
[[nodiscard]] ConvergenceSetup desk_convergence_setup();
/// Full-size preset: l in {9..16}, L_ref = 19, p = 5, M = 1000, T = 2.
[[nodiscard]] ConvergenceSetup paper_convergence_setup();

struct ConvergenceReport {
    SchemeKind kind = SchemeKind::LogTEM;
    std::vector<int> step_exponents;
    std::vector<double> errors_p;
    double p = 0.0;
    std::size_t m_paths = 0;
    double t_final = 0.0;
    int reference_exponent = 0;
    std::uint64_t seed = 0;
    /// Fit of log2(error) against log2(dt); slope is NaN when any error is 0.
    LineFit fit;
};

/// Error(p) per step exponent against a reference run at 2^-reference_exponent
/// driven by the same Brownian path. Exponents equal to the reference level
/// are allowed here (they give exactly 0).
[[nodiscard]] std::vector<double> compute_strong_errors(const SisParams& params, const ConvergenceSetup& setup);

/// Full study: requires reference_exponent > every step exponent, p > 0,
/// M >= 2 and a horizon that is a whole number of coarsest steps.
[[nodiscard]] ConvergenceReport strong_error_study(const SisParams& params, const ConvergenceSetup& setup);

// ---------------------------------------------------------------------------
// Extinction diagnostics

enum class HForm { AsPrinted, AsDerived };

[[nodiscard]] std::string_view to_string(HForm form) noexcept;
/// "printed" / "derived".
[[nodiscard]] std::optional<HForm> parse_h_form(std::string_view name) noexcept;

/// Step-size penalty on the numerical Lyapunov exponent bound.
///   AsDerived: 6|eta + s^2N^2/2|^3 dt^2 + 6 K^3 (mu+gamma)^3 dt^1/2 + 4|sigma N|^3 dt^1/2
///   AsPrinted: same, with the middle term lacking the dt^1/2 factor.
/// Throws ConfigError unless 0 < dt <= 1.
[[nodiscard]] double h_of_delta(const SisParams& params, double cap_multiplier, double dt,
                                HForm form = HForm::AsDerived);

enum class ThresholdKind {
    StarA,  // small-noise regime: h = sigma^2 N^2 / 2 + mu + gamma - beta N
    StarB,  // large-noise regime: h = mu + gamma - beta^2 / (2 sigma^2)
};

struct DeltaThreshold {
    enum class Status { Absent, Root, AllAdmissible };
    Status status = Status::Absent;
    double value = 0.0;  // root when status == Root, 1 when AllAdmissible
    double rhs = 0.0;
};

/// Largest admissible step size: solves h(dt) = rhs on (0, 1) by bisection
/// (AsDerived form) to relative tolerance 1e-10. Throws RegimeError when the
/// parameters are not in the regime that `which` belongs to.
[[nodiscard]] DeltaThreshold delta_threshold(const SisParams& params, double cap_multiplier, ThresholdKind which);

struct ExtinctionSetup {
    SchemeConfig scheme = SchemeConfig::with_step(SchemeKind::LogTEM, 1e-2, 50.0);
    std::size_t m_paths = 100;
    double extinction_threshold = 1e-3;
    std::uint64_t seed = 0;
    HForm h_form = HForm::AsDerived;
    unsigned threads = 0;
};

struct ExtinctionReport {
    Regime regime = Regime::Unclassified;
    double dt = 0.0;
    double horizon = 0.0;        // n * dt actually simulated
    double cap_multiplier = 0.0;
    double extinction_threshold = 0.0;
    /// Finite-horizon exponent proxy (log I_T - log I_0) / T per path.
    std::vector<double> exponent_estimates;
    std::vector<double> final_log_infected;
    double mean_exponent = 0.0;
    double median_exponent = 0.0;
    double fraction_below_threshold = 0.0;
    double h_value = 0.0;
    HForm h_form = HForm::AsDerived;
    /// ext_bound_a (or ext_bound_b) + h(dt); absent when unclassified.
    std::optional<double> theoretical_bound;
    std::optional<DeltaThreshold> delta_star;
    std::size_t truncation_total = 0;
};

/// Runs M log-scheme trajectories on streamed Brownian increments and
/// summarises their finite-horizon exponents. ClassicalEM is rejected.
[[nodiscard]] ExtinctionReport extinction_study(const SisParams& params, const ExtinctionSetup& setup);

}  // namespace sis
