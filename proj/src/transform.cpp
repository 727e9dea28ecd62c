// SPDX-License-Identifier: Apache-2.0
#include "sis/transform.hpp"

#include <cmath>
#include <string>

#include "sis/errors.hpp"

namespace sis {

double logistic(double x) noexcept {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

YState forward(double i, const SisParams& params) {
    const double n = params.cap_n;
    if (!(i > 0.0 && i < n)) {
        throw DomainError("forward transform needs 0 < I < N, got I = " + std::to_string(i));
    }
    return YState{std::log(i) - std::log(n - i)};
}

double inverse(YState y, const SisParams& params) noexcept {
    return params.cap_n * logistic(y.value);
}

double log_infected(YState y, const SisParams& params) noexcept {
    // log N + y - log(1 + e^y), split so neither branch overflows
    const double x = y.value;
    if (x >= 0.0) {
        return std::log(params.cap_n) - std::log1p(std::exp(-x));
    }
    return std::log(params.cap_n) + x - std::log1p(std::exp(x));
}

bool is_boundary_saturated(double i, const SisParams& params) noexcept {
    return !(i > 0.0 && i < params.cap_n);
}

double drift_f(YState y, const SisParams& params) {
    const double n = params.cap_n;
    const double s2n2 = params.sigma * params.sigma * n * n;
    const double removal = params.removal_rate();

    double removal_term = 0.0;
    if (removal != 0.0) {
        removal_term = removal * std::exp(y.value);
        if (!std::isfinite(removal_term)) {
            throw OverflowError("drift F(y) overflows at y = " + std::to_string(y.value));
        }
    }
    // 1 / (1 + e^y) == logistic(-y)
    return params.eta() - removal_term + 0.5 * s2n2 - s2n2 * logistic(-y.value);
}

}  // namespace sis
