// SPDX-License-Identifier: Apache-2.0
#include "sis/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "sis/errors.hpp"

namespace sis {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw InvalidParams(std::string("invalid parameters: ") + what);
    }
}

}  // namespace

void SisParams::validate() const {
    require(std::isfinite(beta) && beta >= 0.0, "beta >= 0");
    require(std::isfinite(mu) && mu >= 0.0, "mu >= 0");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma >= 0");
    require(std::isfinite(sigma), "sigma must be a finite real");
    require(std::isfinite(cap_n) && cap_n > 0.0, "N > 0");
    require(std::isfinite(i0) && i0 > 0.0 && i0 < cap_n, "0 < I0 < N");
}

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::ExtinctSmallNoise: return "ExtinctSmallNoise";
        case Regime::ExtinctLargeNoise: return "ExtinctLargeNoise";
        case Regime::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

DerivedQuantities derive(const SisParams& params) {
    params.validate();

    const double n = params.cap_n;
    const double s2 = params.sigma * params.sigma;
    const double removal = params.removal_rate();

    DerivedQuantities out;
    out.eta = params.beta * n - params.mu - params.gamma;
    out.ext_bound_a = out.eta - 0.5 * s2 * n * n;
    if (s2 > 0.0) {
        out.ext_bound_b = -removal + params.beta * params.beta / (2.0 * s2);
    }
    if (removal > 0.0) {
        out.r0_det = params.beta * n / removal;
        out.r0_stoch = *out.r0_det - s2 * n * n / (2.0 * removal);

        const double beta_over_n = params.beta / n;
        if (*out.r0_stoch < 1.0 && s2 <= beta_over_n) {
            out.regime = Regime::ExtinctSmallNoise;
            assert(out.ext_bound_a < 0.0);
        } else if (s2 > std::max(beta_over_n, params.beta * params.beta / (2.0 * removal))) {
            out.regime = Regime::ExtinctLargeNoise;
            assert(out.ext_bound_b && *out.ext_bound_b < 0.0);
        }
    }
    return out;
}

double log_growth_rate(const SisParams& params, double x) noexcept {
    const double gap = params.cap_n - x;
    return params.eta() - params.beta * x - 0.5 * params.sigma * params.sigma * gap * gap;
}

std::optional<double> log_growth_argmax(const SisParams& params) noexcept {
    const double s2 = params.sigma * params.sigma;
    if (s2 == 0.0) {
        return std::nullopt;
    }
    return (s2 * params.cap_n - params.beta) / s2;
}

MomentConstant moment_constant_kp(const SisParams& params, double p, double t_final) {
    params.validate();
    if (!(p >= 0.0) || !std::isfinite(p)) {
        throw InvalidParams("moment order p must be finite and >= 0");
    }
    if (!(t_final > 0.0) || !std::isfinite(t_final)) {
        throw InvalidParams("horizon T must be finite and > 0");
    }
    if (p == 0.0) {
        return {};
    }

    const double n = params.cap_n;
    const double bn = params.beta * n;
    const double s2n2 = params.sigma * params.sigma * n * n;
    // max(I0^-p, (N-I0)^-p) = min(I0, N-I0)^-p for p > 0
    const double log_prefactor = -p * std::log(std::min(params.i0, n - params.i0));
    const double log_growth =
        p * t_final * (std::abs(bn - params.mu - params.gamma) + 2.0 * bn) +
        0.5 * p * (p + 1.0) * s2n2 * t_final;

    MomentConstant out;
    out.log_value = log_prefactor + log_growth;
    if (out.log_value > std::log(std::numeric_limits<double>::max())) {
        out.value = std::numeric_limits<double>::infinity();
        out.saturated = true;
    } else {
        out.value = std::exp(out.log_value);
    }
    return out;
}

}  // namespace sis
