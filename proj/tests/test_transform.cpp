// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "sis/errors.hpp"
#include "sis/transform.hpp"

using namespace sis;

namespace {

const SisParams kExample{.beta = 0.5, .mu = 20.0, .gamma = 25.0, .sigma = 0.035, .cap_n = 100.0, .i0 = 1.0};

// Ito drift of phi(I) = log I - log(N - I) for dI = a dt + b dB, written from
// the untransformed coefficients only.
double ito_drift(double i, const SisParams& p) {
    const double n = p.cap_n;
    const double a = p.eta() * i - p.beta * i * i;
    const double b = p.sigma * i * (n - i);
    const double d1 = n / (i * (n - i));
    const double d2 = -1.0 / (i * i) + 1.0 / ((n - i) * (n - i));
    return d1 * a + 0.5 * d2 * b * b;
}

double ito_term_scale(double i, const SisParams& p) {
    const double n = p.cap_n;
    const double a = p.eta() * i - p.beta * i * i;
    const double b = p.sigma * i * (n - i);
    const double d1 = n / (i * (n - i));
    const double d2 = -1.0 / (i * i) + 1.0 / ((n - i) * (n - i));
    return std::abs(d1 * a) + std::abs(0.5 * d2 * b * b);
}

}  // namespace

TEST_CASE("forward transform examples") {
    CHECK(forward(50.0, kExample).value == 0.0);
    CHECK(forward(1.0, kExample).value ==
          doctest::Approx(-4.595119850134589926852434051810180709117).epsilon(1e-15));
    CHECK(forward(90.0, kExample).value ==
          doctest::Approx(2.197224577336219382790490473845051409295).epsilon(1e-15));
}

TEST_CASE("forward rejects boundary and outside states") {
    CHECK_THROWS_AS((void)forward(0.0, kExample), DomainError);
    CHECK_THROWS_AS((void)forward(100.0, kExample), DomainError);
    CHECK_THROWS_AS((void)forward(-3.0, kExample), DomainError);
    CHECK_THROWS_AS((void)forward(std::nan(""), kExample), DomainError);
}

TEST_CASE("inverse transform examples") {
    CHECK(inverse(YState{0.0}, kExample) == 50.0);
    CHECK(inverse(YState{-std::log(99.0)}, kExample) == doctest::Approx(1.0).epsilon(1e-12));
    const double top = inverse(YState{1000.0}, kExample);
    CHECK(top == 100.0);
    CHECK(is_boundary_saturated(top, kExample));
    const double bottom = inverse(YState{-1000.0}, kExample);
    CHECK(bottom == 0.0);
    CHECK(is_boundary_saturated(bottom, kExample));
    CHECK_FALSE(is_boundary_saturated(inverse(YState{-700.0}, kExample), kExample));
}

TEST_CASE("log_infected stays finite where I underflows") {
    CHECK(log_infected(YState{-2000.0}, kExample) == doctest::Approx(std::log(100.0) - 2000.0));
    CHECK(log_infected(YState{0.0}, kExample) == doctest::Approx(std::log(50.0)).epsilon(1e-15));
    CHECK(log_infected(YState{800.0}, kExample) == doctest::Approx(std::log(100.0)));
    CHECK(log_infected(YState{-3.0}, kExample) ==
          doctest::Approx(std::log(inverse(YState{-3.0}, kExample))).epsilon(1e-15));
}

TEST_CASE("round trip and monotonicity over random states") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> frac(1e-6, 1.0 - 1e-6);
    const double n = kExample.cap_n;
    for (int trial = 0; trial < 20000; ++trial) {
        const double a = frac(gen) * n;
        const double b = frac(gen) * n;
        CHECK(std::abs(inverse(forward(a, kExample), kExample) - a) <= 1e-12 * n);
        if (a < b) {
            CHECK(forward(a, kExample).value < forward(b, kExample).value);
        }
    }
    std::uniform_real_distribution<double> ys(-40.0, 40.0);
    for (int trial = 0; trial < 20000; ++trial) {
        const double y1 = ys(gen);
        const double y2 = ys(gen);
        if (y1 < y2) {
            CHECK(inverse(YState{y1}, kExample) <= inverse(YState{y2}, kExample));
        }
    }
}

TEST_CASE("drift examples") {
    CHECK(drift_f(YState{0.0}, kExample) == -40.0);
    CHECK(drift_f(YState{-std::log(99.0)}, kExample) ==
          doctest::Approx(-1.457045454545454545454545454545454545455).epsilon(1e-13));
    SisParams p = kExample;
    p.sigma = 0.3;
    p.mu = 3.0;
    CHECK(drift_f(YState{0.0}, p) == doctest::Approx(p.eta() - p.removal_rate()).epsilon(1e-15));
}

TEST_CASE("drift at y = -log 99 matches the Ito drift at I = 1") {
    CHECK(drift_f(forward(1.0, kExample), kExample) == doctest::Approx(ito_drift(1.0, kExample)).epsilon(1e-12));
}

TEST_CASE("drift overflow is reported, not returned") {
    CHECK_THROWS_AS((void)drift_f(YState{800.0}, kExample), OverflowError);
    SisParams no_removal = kExample;
    no_removal.mu = 0.0;
    no_removal.gamma = 0.0;
    CHECK(std::isfinite(drift_f(YState{800.0}, no_removal)));
}

TEST_CASE("Ito consistency and constant diffusion on random parameter sets") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> beta_d(0.0, 1.0);
    std::uniform_real_distribution<double> rate_d(0.0, 50.0);
    std::uniform_real_distribution<double> sigma_d(0.0, 0.1);
    std::uniform_real_distribution<double> n_d(5.0, 500.0);
    for (int set = 0; set < 20; ++set) {
        SisParams p{.beta = beta_d(gen), .mu = rate_d(gen), .gamma = rate_d(gen), .sigma = sigma_d(gen)};
        p.cap_n = n_d(gen);
        p.i0 = 0.5 * p.cap_n;
        for (int k = 0; k <= 200; ++k) {
            const double lower = p.cap_n * std::pow(10.0, -6.0 + 6.0 * k / 200.0) * 0.5;
            for (const double i : {lower, p.cap_n - lower}) {
                const double f = drift_f(forward(i, p), p);
                CHECK(std::abs(f - ito_drift(i, p)) <= 1e-9 * ito_term_scale(i, p));
                const double diffusion = p.cap_n / (i * (p.cap_n - i)) * (p.sigma * i * (p.cap_n - i));
                CHECK(diffusion == doctest::Approx(p.sigma * p.cap_n).epsilon(1e-12));
            }
        }
    }
}
