// SPDX-License-Identifier: Apache-2.0
#include "sis/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sis/errors.hpp"

namespace sis {

std::string_view to_string(SchemeKind kind) noexcept {
    switch (kind) {
        case SchemeKind::ClassicalEM: return "em";
        case SchemeKind::LogEM: return "logem";
        case SchemeKind::LogTEM: return "logtem";
    }
    return "logtem";
}

std::optional<SchemeKind> parse_scheme(std::string_view name) noexcept {
    if (name == "em") return SchemeKind::ClassicalEM;
    if (name == "logem") return SchemeKind::LogEM;
    if (name == "logtem") return SchemeKind::LogTEM;
    return std::nullopt;
}

SchemeConfig SchemeConfig::dyadic(SchemeKind kind, int exponent, double horizon) {
    SchemeConfig c;
    c.kind = kind;
    c.dt = dyadic_step(exponent);
    c.step_exponent = exponent;
    c.horizon = horizon;
    return c;
}

SchemeConfig SchemeConfig::with_step(SchemeKind kind, double dt, double horizon) {
    SchemeConfig c;
    c.kind = kind;
    c.dt = dt;
    c.horizon = horizon;
    return c;
}

double default_cap_multiplier(const SisParams& params) {
    return 2.0 * (1.0 + std::exp(forward(params.i0, params).value));
}

void SchemeConfig::validate(const SisParams& params) const {
    params.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("step size must be finite and > 0");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ConfigError("horizon must be finite and > 0");
    }
    if (step_exponent && dyadic_step(*step_exponent) != dt) {
        throw ConfigError("step size does not equal 2^-step_exponent");
    }
    if (kind == SchemeKind::LogTEM) {
        if (!(dt < 1.0)) {
            throw ConfigError("LogTEM needs step size in (0, 1)");
        }
        if (cap_multiplier) {
            const double floor_k = 1.0 + std::exp(forward(params.i0, params).value);
            if (!(*cap_multiplier > floor_k)) {
                throw ConfigError("LogTEM needs K > 1 + e^{Y0} = " + std::to_string(floor_k));
            }
        }
    }
}

double tem_cap(double cap_multiplier, double dt) noexcept {
    if (std::isinf(cap_multiplier)) {
        return std::numeric_limits<double>::infinity();
    }
    return std::log(cap_multiplier / std::sqrt(dt));
}

YState step_log_em(YState y, double db, double dt, const SisParams& params) {
    return YState{y.value + drift_f(y, params) * dt + params.diffusion() * db};
}

TemStep step_log_tem_capped(YState y, double db, double dt, const SisParams& params, double cap) {
    const YState pre = step_log_em(y, db, dt, params);
    if (pre.value > cap) {
        return {YState{cap}, true};
    }
    return {pre, false};
}

TemStep step_log_tem(YState y, double db, double dt, const SisParams& params, double cap_multiplier) {
    return step_log_tem_capped(y, db, dt, params, tem_cap(cap_multiplier, dt));
}

ClassicalStep step_classical_em(double i, double db, double dt, const SisParams& params) noexcept {
    const double n = params.cap_n;
    const double next = i + (params.eta() * i - params.beta * i * i) * dt + params.sigma * i * (n - i) * db;
    return {next, !(next > 0.0 && next < n)};
}

Stepper::Stepper(const SisParams& params, const SchemeConfig& config)
    : params_(params), kind_(config.kind), dt_(config.dt), cap_(std::numeric_limits<double>::infinity()) {
    config.validate(params);
    if (kind_ == SchemeKind::ClassicalEM) {
        i_ = params.i0;
        y_ = YState{std::numeric_limits<double>::quiet_NaN()};
        return;
    }
    y_ = forward(params.i0, params);
    i_ = inverse(y_, params);
    if (kind_ == SchemeKind::LogTEM) {
        cap_ = tem_cap(config.cap_multiplier.value_or(default_cap_multiplier(params)), dt_);
    }
}

void Stepper::advance(double db) {
    ++steps_;
    switch (kind_) {
        case SchemeKind::ClassicalEM: {
            const ClassicalStep s = step_classical_em(i_, db, dt_, params_);
            i_ = s.i;
            domain_exit_ = domain_exit_ || s.domain_exit;
            return;
        }
        case SchemeKind::LogEM: {
            y_ = step_log_em(y_, db, dt_, params_);
            pre_truncation_ = y_.value;
            break;
        }
        case SchemeKind::LogTEM: {
            const YState pre = step_log_em(y_, db, dt_, params_);
            pre_truncation_ = pre.value;
            last_truncated_ = pre.value > cap_;
            y_ = last_truncated_ ? YState{cap_} : pre;
            truncations_ += last_truncated_ ? 1 : 0;
            break;
        }
    }
    if (!std::isfinite(y_.value)) {
        throw OverflowError("log-scheme state left the finite range at step " + std::to_string(steps_));
    }
    i_ = inverse(y_, params_);
    saturated_ = saturated_ || is_boundary_saturated(i_, params_);
}

double Stepper::log_infected() const noexcept {
    if (kind_ == SchemeKind::ClassicalEM) {
        return std::log(i_);
    }
    return sis::log_infected(y_, params_);
}

TrajectoryRecord run_trajectory(const SisParams& params, const SchemeConfig& config,
                                std::span<const double> increments) {
    Stepper stepper(params, config);
    const std::size_t n = whole_steps(config.horizon, config.dt);
    if (increments.size() < n) {
        throw ConfigError("need " + std::to_string(n) + " increments, got " + std::to_string(increments.size()));
    }

    const bool log_scheme = config.kind != SchemeKind::ClassicalEM;
    TrajectoryRecord rec;
    rec.kind = config.kind;
    rec.dt = config.dt;
    rec.step_count = n;
    rec.cap = stepper.cap();
    if (log_scheme) {
        rec.y_states.emplace();
    }
    if (config.keep_pre_truncation) {
        rec.pre_truncation_y.emplace();
    }

    const auto record = [&](std::size_t k) {
        rec.times.push_back(static_cast<double>(k) * config.dt);
        rec.i_states.push_back(stepper.infected());
        rec.truncated.push_back(k > 0 && stepper.last_truncated() ? 1 : 0);
        if (log_scheme) {
            rec.y_states->push_back(stepper.y().value);
        }
        if (rec.pre_truncation_y) {
            rec.pre_truncation_y->push_back(k == 0 ? stepper.y().value : stepper.last_pre_truncation());
        }
    };

    const std::size_t stride = config.record_stride;
    if (stride > 0) {
        const std::size_t slots = n / stride + 2;
        rec.times.reserve(slots);
        rec.i_states.reserve(slots);
        rec.truncated.reserve(slots);
    }
    record(0);
    for (std::size_t k = 1; k <= n; ++k) {
        stepper.advance(increments[k - 1]);
        if ((stride > 0 && k % stride == 0) || k == n) {
            record(k);
        }
    }
    rec.truncation_count = stepper.truncation_count();
    rec.boundary_saturated = stepper.boundary_saturated();
    rec.domain_exit = stepper.domain_exit();
    return rec;
}

TrajectoryRecord run_trajectory(const SisParams& params, const SchemeConfig& config, const BrownianGrid& grid) {
    if (grid.horizon + 1e-12 * grid.horizon < config.horizon) {
        throw ConfigError("grid horizon is shorter than the scheme horizon");
    }
    if (config.step_exponent) {
        if (!grid.fine_exponent) {
            throw ConfigError("dyadic scheme needs a dyadic grid");
        }
        if (*config.step_exponent == *grid.fine_exponent) {
            return run_trajectory(params, config, std::span<const double>(grid.increments));
        }
        return run_trajectory(params, config, coarsen(grid, *config.step_exponent));
    }
    if (grid.fine_dt != config.dt) {
        throw ConfigError("explicit step size must equal the grid step");
    }
    return run_trajectory(params, config, std::span<const double>(grid.increments));
}

}  // namespace sis
