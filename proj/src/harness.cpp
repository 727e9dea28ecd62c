// SPDX-License-Identifier: Apache-2.0
#include "sis/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "sis/errors.hpp"
#include "sis/paths.hpp"

namespace sis {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

LineFit fit_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) {
        throw DegenerateFit("slope fit needs at least two points");
    }
    const double n = static_cast<double>(points.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) {
        throw DegenerateFit("slope fit needs distinct abscissae");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0.0) {
        fit.r2 = 1.0;
    } else {
        double ss_res = 0.0;
        for (const auto& [x, y] : points) {
            const double r = y - (fit.intercept + fit.slope * x);
            ss_res += r * r;
        }
        fit.r2 = 1.0 - ss_res / syy;
    }
    return fit;
}

ConvergenceSetup desk_convergence_setup() {
    ConvergenceSetup s;
    s.step_exponents = {6, 7, 8, 9, 10, 11, 12};
    s.reference_exponent = 15;
    s.p = 5.0;
    s.m_paths = 200;
    s.t_final = 1.0;
    return s;
}

ConvergenceSetup paper_convergence_setup() {
    ConvergenceSetup s;
    s.step_exponents = {9, 10, 11, 12, 13, 14, 15, 16};
    s.reference_exponent = 19;
    s.p = 5.0;
    s.m_paths = 1000;
    s.t_final = 2.0;
    return s;
}

namespace {

SchemeConfig level_config(const ConvergenceSetup& setup, int exponent) {
    SchemeConfig c = SchemeConfig::dyadic(setup.kind, exponent, setup.t_final);
    c.cap_multiplier = setup.cap_multiplier;
    return c;
}

}  // namespace

std::vector<double> compute_strong_errors(const SisParams& params, const ConvergenceSetup& setup) {
    params.validate();
    if (setup.step_exponents.empty()) {
        throw ConfigError("at least one step exponent is required");
    }
    for (const int e : setup.step_exponents) {
        if (e < 0 || e > setup.reference_exponent) {
            throw ConfigError("step exponents must lie in [0, reference_exponent]");
        }
    }
    if (!(setup.p > 0.0) || !std::isfinite(setup.p)) {
        throw ConfigError("moment order p must be > 0");
    }
    if (setup.m_paths == 0) {
        throw ConfigError("need at least one path");
    }
    // validate every level once up front so worker threads only see numerical errors
    level_config(setup, setup.reference_exponent).validate(params);
    for (const int e : setup.step_exponents) {
        level_config(setup, e).validate(params);
    }

    const std::size_t levels = setup.step_exponents.size();
    // sup_k |I_ref(t_k) - I_k| per path and level
    std::vector<double> sup_abs(setup.m_paths * levels, 0.0);

    parallel_for(setup.m_paths, setup.threads, [&](std::size_t j) {
        const BrownianGrid grid = generate(setup.seed, j, setup.reference_exponent, setup.t_final);

        const SchemeConfig ref_cfg = level_config(setup, setup.reference_exponent);
        const std::size_t n_ref = whole_steps(setup.t_final, ref_cfg.dt);
        std::vector<double> reference(n_ref + 1);
        {
            Stepper stepper(params, ref_cfg);
            reference[0] = stepper.infected();
            for (std::size_t k = 0; k < n_ref; ++k) {
                stepper.advance(grid.increments[k]);
                reference[k + 1] = stepper.infected();
            }
        }

        for (std::size_t l = 0; l < levels; ++l) {
            const int exponent = setup.step_exponents[l];
            const std::size_t ratio = std::size_t{1} << (setup.reference_exponent - exponent);
            const SchemeConfig cfg = level_config(setup, exponent);
            const std::size_t n = whole_steps(setup.t_final, cfg.dt);
            const std::vector<double> coarse = aggregate(grid.increments, ratio);

            Stepper stepper(params, cfg);
            double worst = std::abs(reference[0] - stepper.infected());
            for (std::size_t k = 0; k < n; ++k) {
                stepper.advance(coarse[k]);
                const double diff = std::abs(reference[(k + 1) * ratio] - stepper.infected());
                // NaN (classical EM blow-up) must dominate the sup
                if (!(diff <= worst)) {
                    worst = diff;
                }
            }
            sup_abs[j * levels + l] = worst;
        }
    });

    std::vector<double> errors(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        double acc = 0.0;
        for (std::size_t j = 0; j < setup.m_paths; ++j) {
            acc += std::pow(sup_abs[j * levels + l], setup.p);
        }
        errors[l] = std::pow(acc / static_cast<double>(setup.m_paths), 1.0 / setup.p);
    }
    return errors;
}

ConvergenceReport strong_error_study(const SisParams& params, const ConvergenceSetup& setup) {
    for (const int e : setup.step_exponents) {
        if (e >= setup.reference_exponent) {
            throw ConfigError("reference exponent must exceed every step exponent");
        }
    }
    if (setup.m_paths < 2) {
        throw ConfigError("convergence study needs M >= 2");
    }
    if (!setup.step_exponents.empty()) {
        const int coarsest = *std::min_element(setup.step_exponents.begin(), setup.step_exponents.end());
        const double steps = setup.t_final / dyadic_step(coarsest);
        if (!(setup.t_final > 0.0) || steps != std::floor(steps)) {
            throw ConfigError("horizon must be a whole number of the coarsest dyadic step");
        }
    }

    ConvergenceReport report;
    report.kind = setup.kind;
    report.step_exponents = setup.step_exponents;
    report.p = setup.p;
    report.m_paths = setup.m_paths;
    report.t_final = setup.t_final;
    report.reference_exponent = setup.reference_exponent;
    report.seed = setup.seed;
    report.errors_p = compute_strong_errors(params, setup);

    const bool usable = std::all_of(report.errors_p.begin(), report.errors_p.end(),
                                    [](double e) { return e > 0.0 && std::isfinite(e); });
    if (usable && report.errors_p.size() >= 2) {
        std::vector<std::pair<double, double>> points;
        points.reserve(report.errors_p.size());
        for (std::size_t l = 0; l < report.errors_p.size(); ++l) {
            points.emplace_back(-static_cast<double>(report.step_exponents[l]), std::log2(report.errors_p[l]));
        }
        report.fit = fit_slope(points);
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        report.fit = {nan, nan, nan};
    }
    return report;
}

std::string_view to_string(HForm form) noexcept {
    return form == HForm::AsPrinted ? "printed" : "derived";
}

std::optional<HForm> parse_h_form(std::string_view name) noexcept {
    if (name == "printed") return HForm::AsPrinted;
    if (name == "derived") return HForm::AsDerived;
    return std::nullopt;
}

double h_of_delta(const SisParams& params, double cap_multiplier, double dt, HForm form) {
    if (!(dt > 0.0 && dt <= 1.0)) {
        throw ConfigError("h(dt) needs 0 < dt <= 1");
    }
    const double n = params.cap_n;
    const double drift_sup = std::abs(params.eta() + 0.5 * params.sigma * params.sigma * n * n);
    const double removal = params.removal_rate();
    const double noise = std::abs(params.sigma * n);
    const double root_dt = std::sqrt(dt);

    const double k3 = cap_multiplier * cap_multiplier * cap_multiplier;
    const double middle = 6.0 * k3 * removal * removal * removal;
    return 6.0 * drift_sup * drift_sup * drift_sup * dt * dt +
           (form == HForm::AsDerived ? middle * root_dt : middle) + 4.0 * noise * noise * noise * root_dt;
}

DeltaThreshold delta_threshold(const SisParams& params, double cap_multiplier, ThresholdKind which) {
    const DerivedQuantities d = derive(params);
    DeltaThreshold out;
    if (which == ThresholdKind::StarA) {
        if (d.regime != Regime::ExtinctSmallNoise) {
            throw RegimeError("dt* needs the small-noise extinction regime");
        }
        out.rhs = -d.ext_bound_a;
    } else {
        if (d.regime != Regime::ExtinctLargeNoise) {
            throw RegimeError("dt** needs the large-noise extinction regime");
        }
        out.rhs = -*d.ext_bound_b;
    }

    if (!(out.rhs > 0.0)) {
        return out;
    }
    const auto excess = [&](double dt) { return h_of_delta(params, cap_multiplier, dt, HForm::AsDerived) - out.rhs; };
    if (excess(1.0) <= 0.0) {
        out.status = DeltaThreshold::Status::AllAdmissible;
        out.value = 1.0;
        return out;
    }

    // h(0+) = 0 < rhs and h(1) > rhs, h increasing: a single crossing in (0, 1)
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 500 && hi - lo > 1e-10 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.status = DeltaThreshold::Status::Root;
    out.value = 0.5 * (lo + hi);
    return out;
}

ExtinctionReport extinction_study(const SisParams& params, const ExtinctionSetup& setup) {
    const DerivedQuantities derived = derive(params);
    const SchemeConfig& cfg = setup.scheme;
    cfg.validate(params);
    if (cfg.kind == SchemeKind::ClassicalEM) {
        throw ConfigError("extinction study needs a logarithmic scheme");
    }
    if (setup.m_paths == 0) {
        throw ConfigError("need at least one path");
    }
    if (!(setup.extinction_threshold > 0.0)) {
        throw ConfigError("extinction threshold must be > 0");
    }

    const std::size_t n = whole_steps(cfg.horizon, cfg.dt);
    if (n == 0) {
        throw ConfigError("horizon shorter than one step");
    }
    const double t_end = static_cast<double>(n) * cfg.dt;

    ExtinctionReport report;
    report.regime = derived.regime;
    report.dt = cfg.dt;
    report.horizon = t_end;
    report.extinction_threshold = setup.extinction_threshold;
    report.cap_multiplier = cfg.cap_multiplier.value_or(default_cap_multiplier(params));
    report.exponent_estimates.resize(setup.m_paths);
    report.final_log_infected.resize(setup.m_paths);
    std::vector<std::size_t> truncations(setup.m_paths, 0);

    const double log_i0 = std::log(params.i0);
    parallel_for(setup.m_paths, setup.threads, [&](std::size_t j) {
        const BrownianStream stream(setup.seed, j, cfg.dt);
        Stepper stepper(params, cfg);
        for (std::size_t k = 0; k < n; ++k) {
            stepper.advance(stream.increment(k));
        }
        report.final_log_infected[j] = stepper.log_infected();
        report.exponent_estimates[j] = (report.final_log_infected[j] - log_i0) / t_end;
        truncations[j] = stepper.truncation_count();
    });

    const double m = static_cast<double>(setup.m_paths);
    report.mean_exponent =
        std::accumulate(report.exponent_estimates.begin(), report.exponent_estimates.end(), 0.0) / m;
    std::vector<double> sorted = report.exponent_estimates;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    report.median_exponent = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

    const double log_threshold = std::log(setup.extinction_threshold);
    const auto below = std::count_if(report.final_log_infected.begin(), report.final_log_infected.end(),
                                     [&](double v) { return v < log_threshold; });
    report.fraction_below_threshold = static_cast<double>(below) / m;
    report.truncation_total = std::accumulate(truncations.begin(), truncations.end(), std::size_t{0});

    report.h_form = setup.h_form;
    report.h_value = h_of_delta(params, report.cap_multiplier, std::min(cfg.dt, 1.0), setup.h_form);
    if (derived.regime == Regime::ExtinctSmallNoise) {
        report.theoretical_bound = derived.ext_bound_a + report.h_value;
        report.delta_star = delta_threshold(params, report.cap_multiplier, ThresholdKind::StarA);
    } else if (derived.regime == Regime::ExtinctLargeNoise) {
        report.theoretical_bound = *derived.ext_bound_b + report.h_value;
        report.delta_star = delta_threshold(params, report.cap_multiplier, ThresholdKind::StarB);
    }
    return report;
}

}  // namespace sis
