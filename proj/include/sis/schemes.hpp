// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sis/model.hpp"
#include "sis/paths.hpp"
#include "sis/transform.hpp"

namespace sis {

enum class SchemeKind { ClassicalEM, LogEM, LogTEM };

[[nodiscard]] std::string_view to_string(SchemeKind kind) noexcept;
/// Accepts the CLI spellings "em", "logem", "logtem".
[[nodiscard]] std::optional<SchemeKind> parse_scheme(std::string_view name) noexcept;

struct SchemeConfig {
    SchemeKind kind = SchemeKind::LogTEM;
    double dt = 1.0 / 64.0;
    std::optional<int> step_exponent;  // set when dt == 2^-step_exponent
    double horizon = 1.0;
    /// Truncation constant K for LogTEM; default_cap_multiplier() when unset.
    /// +infinity disables truncation (test hook).
    std::optional<double> cap_multiplier;
    /// Record every stride-th state; 0 records only the initial and final states.
    std::size_t record_stride = 1;
    /// Keep the pre-truncation LogTEM states alongside the recorded ones.
    bool keep_pre_truncation = false;

    [[nodiscard]] static SchemeConfig dyadic(SchemeKind kind, int exponent, double horizon);
    [[nodiscard]] static SchemeConfig with_step(SchemeKind kind, double dt, double horizon);

    /// Throws ConfigError for dt outside (0, 1) under LogTEM or K <= 1 + e^{Y0}.
    void validate(const SisParams& params) const;
};

/// K = 2 (1 + e^{Y0}).
[[nodiscard]] double default_cap_multiplier(const SisParams& params);

/// log(K dt^-1/2); +infinity when K is infinite.
[[nodiscard]] double tem_cap(double cap_multiplier, double dt) noexcept;

/// Y + F(Y) dt + sigma N dB. Overflow from F propagates.
[[nodiscard]] YState step_log_em(YState y, double db, double dt, const SisParams& params);

struct TemStep {
    YState y;
    bool truncated = false;
};

/// Log-EM step followed by min(., log(K dt^-1/2)).
[[nodiscard]] TemStep step_log_tem(YState y, double db, double dt, const SisParams& params,
                                   double cap_multiplier);
/// Same step with the cap log(K dt^-1/2) already evaluated.
[[nodiscard]] TemStep step_log_tem_capped(YState y, double db, double dt, const SisParams& params,
                                          double cap);

struct ClassicalStep {
    double i = 0.0;
    bool domain_exit = false;  // result outside (0, N)
};

/// I + (eta I - beta I^2) dt + sigma I (N - I) dB on the untransformed equation.
[[nodiscard]] ClassicalStep step_classical_em(double i, double db, double dt, const SisParams& params) noexcept;

/// Incremental integrator shared by run_trajectory and the Monte Carlo harness.
class Stepper {
public:
    Stepper(const SisParams& params, const SchemeConfig& config);

    void advance(double db);

    [[nodiscard]] SchemeKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t steps_taken() const noexcept { return steps_; }
    [[nodiscard]] YState y() const noexcept { return y_; }
    [[nodiscard]] double infected() const noexcept { return i_; }
    /// log I; stable in y-space for the logarithmic schemes.
    [[nodiscard]] double log_infected() const noexcept;
    [[nodiscard]] bool last_truncated() const noexcept { return last_truncated_; }
    [[nodiscard]] double last_pre_truncation() const noexcept { return pre_truncation_; }
    [[nodiscard]] double cap() const noexcept { return cap_; }
    [[nodiscard]] std::size_t truncation_count() const noexcept { return truncations_; }
    [[nodiscard]] bool domain_exit() const noexcept { return domain_exit_; }
    [[nodiscard]] bool boundary_saturated() const noexcept { return saturated_; }

private:
    SisParams params_;
    SchemeKind kind_;
    double dt_;
    double cap_;
    YState y_;
    double i_;
    double pre_truncation_ = 0.0;
    bool last_truncated_ = false;
    bool domain_exit_ = false;
    bool saturated_ = false;
    std::size_t steps_ = 0;
    std::size_t truncations_ = 0;
};

struct TrajectoryRecord {
    SchemeKind kind = SchemeKind::LogTEM;
    double dt = 0.0;
    std::size_t step_count = 0;
    std::vector<double> times;
    std::optional<std::vector<double>> y_states;  // absent for ClassicalEM
    std::vector<double> i_states;
    std::vector<std::uint8_t> truncated;  // 1 when the step into this state hit the cap
    std::optional<std::vector<double>> pre_truncation_y;
    std::size_t truncation_count = 0;
    double cap = 0.0;
    bool boundary_saturated = false;
    bool domain_exit = false;
};

/// Iterates the scheme over increments[0 .. whole_steps(horizon, dt)).
[[nodiscard]] TrajectoryRecord run_trajectory(const SisParams& params, const SchemeConfig& config,
                                              std::span<const double> increments);

/// Coarsens the grid to config.step_exponent (or uses it as-is for explicit
/// step sizes, which must match grid.fine_dt) and runs the scheme.
[[nodiscard]] TrajectoryRecord run_trajectory(const SisParams& params, const SchemeConfig& config,
                                              const BrownianGrid& grid);

}  // namespace sis
