// SPDX-License-Identifier: Apache-2.0
// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sis/cli.hpp"
#include "sis/harness.hpp"
#include "sis/paths.hpp"
#include "sis/schemes.hpp"
#include "sis/transform.hpp"

using namespace sis;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and thresholds.
constexpr double kRoundTripTol = 1e-12;
constexpr double kItoRelTol = 1e-9;
constexpr double kDiffusionRelTol = 1e-12;
constexpr double kFastSeconds = 1.0;
constexpr double kSlopeLo = 0.8;
constexpr double kSlopeHi = 1.2;
constexpr double kMinR2 = 0.98;
constexpr double kConvergeSeconds = 300.0;
constexpr double kSmallNoiseMeanMax = -0.5;
constexpr double kSmallNoiseFractionMin = 0.95;
constexpr double kExtinctionSeconds = 60.0;
constexpr double kLargeNoiseMeanMax = -10.0;
constexpr double kThresholdRelTol = 1e-8;
constexpr std::uint64_t kSeed = 20220501;

SisParams example(double sigma) {
    return {.beta = 0.5, .mu = 20.0, .gamma = 25.0, .sigma = sigma, .cap_n = 100.0, .i0 = 1.0};
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

void check_round_trip() {
    const auto t0 = Clock::now();
    const SisParams p = example(0.035);
    std::mt19937_64 gen(kSeed);
    std::uniform_real_distribution<double> frac(1e-6, 1.0 - 1e-6);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const double i = frac(gen) * p.cap_n;
        worst = std::max(worst, std::abs(inverse(forward(i, p), p) - i));
    }
    const double secs = seconds_since(t0);
    report("transform_round_trip", worst <= kRoundTripTol * p.cap_n && secs < kFastSeconds,
           fmt("max |inverse(forward(I)) - I| / N = %.3g, %.3f s", worst / p.cap_n, secs));
}

double ito_drift(double i, const SisParams& p, double& scale) {
    const double n = p.cap_n;
    const double a = p.eta() * i - p.beta * i * i;
    const double b = p.sigma * i * (n - i);
    const double d1 = n / (i * (n - i));
    const double d2 = -1.0 / (i * i) + 1.0 / ((n - i) * (n - i));
    scale = std::abs(d1 * a) + std::abs(0.5 * d2 * b * b);
    return d1 * a + 0.5 * d2 * b * b;
}

void check_ito() {
    const auto t0 = Clock::now();
    std::vector<SisParams> sets{example(0.035)};
    std::mt19937_64 gen(kSeed + 1);
    std::uniform_real_distribution<double> beta_d(0.0, 1.0);
    std::uniform_real_distribution<double> rate_d(0.0, 50.0);
    std::uniform_real_distribution<double> sigma_d(0.0, 0.1);
    std::uniform_real_distribution<double> n_d(5.0, 500.0);
    for (int s = 0; s < 20; ++s) {
        SisParams p{.beta = beta_d(gen), .mu = rate_d(gen), .gamma = rate_d(gen), .sigma = sigma_d(gen)};
        p.cap_n = n_d(gen);
        p.i0 = 0.5 * p.cap_n;
        sets.push_back(p);
    }
    double worst_drift = 0.0;
    double worst_diffusion = 0.0;
    for (const SisParams& p : sets) {
        // 5000 log-spaced points towards each boundary
        for (int k = 0; k < 5000; ++k) {
            const double offset = 0.5 * p.cap_n * std::pow(10.0, -6.0 + 6.0 * k / 4999.0);
            for (const double i : {offset, p.cap_n - offset}) {
                if (!(i > 0.0 && i < p.cap_n)) {
                    continue;
                }
                double scale = 0.0;
                const double expected = ito_drift(i, p, scale);
                const double got = drift_f(forward(i, p), p);
                if (scale > 0.0) {
                    worst_drift = std::max(worst_drift, std::abs(got - expected) / scale);
                }
                const double noise = p.sigma * p.cap_n;
                if (noise > 0.0) {
                    const double diffusion = p.cap_n / (i * (p.cap_n - i)) * (p.sigma * i * (p.cap_n - i));
                    worst_diffusion = std::max(worst_diffusion, std::abs(diffusion - noise) / noise);
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    report("ito_consistency",
           worst_drift <= kItoRelTol && worst_diffusion <= kDiffusionRelTol && secs < kFastSeconds,
           fmt("max drift rel err %.3g, max diffusion rel err %.3g, %.3f s", worst_drift, worst_diffusion, secs));
}

void check_positivity() {
    const SisParams p = example(0.035);
    SchemeConfig tem = SchemeConfig::dyadic(SchemeKind::LogTEM, 6, 50.0);
    std::size_t bad_domain = 0;
    std::size_t above_cap = 0;
    for (std::uint64_t j = 0; j < 1000; ++j) {
        const BrownianGrid g = generate(kSeed, j, 6, 50.0);
        const TrajectoryRecord rec = run_trajectory(p, tem, g);
        for (std::size_t k = 0; k < rec.i_states.size(); ++k) {
            const double i = rec.i_states[k];
            if (!(i > 0.0 && i < p.cap_n) && !rec.boundary_saturated) {
                ++bad_domain;
            }
            if ((*rec.y_states)[k] > rec.cap) {
                ++above_cap;
            }
        }
    }
    std::size_t em_exits = 0;
    const SchemeConfig em = SchemeConfig::dyadic(SchemeKind::ClassicalEM, 2, 50.0);
    for (std::uint64_t j = 0; j < 1000; ++j) {
        const BrownianGrid g = generate(kSeed, j, 2, 50.0);
        em_exits += run_trajectory(p, em, g).domain_exit ? 1 : 0;
    }
    report("positivity", bad_domain == 0 && above_cap == 0 && em_exits >= 1,
           fmt("LogTEM unflagged out-of-domain %zu, above cap %zu; classical EM exits on %zu/1000 paths",
               bad_domain, above_cap, em_exits));
}

void check_convergence() {
    const auto t0 = Clock::now();
    ConvergenceSetup s = desk_convergence_setup();
    s.seed = kSeed;
    const ConvergenceReport r = strong_error_study(example(0.035), s);
    const double secs = seconds_since(t0);
    const bool pass = r.fit.slope >= kSlopeLo && r.fit.slope <= kSlopeHi && r.fit.r2 >= kMinR2 &&
                      secs < kConvergeSeconds;
    report("strong_order_one", pass, fmt("slope %.4f, r2 %.4f, %.1f s", r.fit.slope, r.fit.r2, secs));
}

void check_small_noise_extinction() {
    const auto t0 = Clock::now();
    ExtinctionSetup s;
    s.seed = kSeed;
    const ExtinctionReport r = extinction_study(example(0.035), s);
    const double secs = seconds_since(t0);
    const bool pass = r.mean_exponent <= kSmallNoiseMeanMax &&
                      r.fraction_below_threshold >= kSmallNoiseFractionMin && secs < kExtinctionSeconds;
    report("extinction_small_noise", pass,
           fmt("mean exponent %.4f, fraction below 1e-3 %.2f, %.1f s", r.mean_exponent,
               r.fraction_below_threshold, secs));
}

void check_large_noise_extinction() {
    const auto t0 = Clock::now();
    ExtinctionSetup s;
    s.seed = kSeed;
    const ExtinctionReport r = extinction_study(example(0.08), s);
    const double secs = seconds_since(t0);
    report("extinction_large_noise", r.mean_exponent <= kLargeNoiseMeanMax && secs < kExtinctionSeconds,
           fmt("mean exponent %.4f, %.1f s", r.mean_exponent, secs));
}

void check_truncation_inactivity() {
    const SisParams p = example(0.035);
    SchemeConfig tem = SchemeConfig::dyadic(SchemeKind::LogTEM, 6, 10.0);
    tem.cap_multiplier = std::numeric_limits<double>::infinity();
    const SchemeConfig em = SchemeConfig::dyadic(SchemeKind::LogEM, 6, 10.0);
    std::size_t mismatched = 0;
    for (std::uint64_t j = 0; j < 1000; ++j) {
        const BrownianGrid g = generate(kSeed, j, 6, 10.0);
        const auto a = run_trajectory(p, tem, g);
        const auto b = run_trajectory(p, em, g);
        const bool same = a.y_states->size() == b.y_states->size() &&
                          std::memcmp(a.y_states->data(), b.y_states->data(), a.y_states->size() * sizeof(double)) == 0 &&
                          std::memcmp(a.i_states.data(), b.i_states.data(), a.i_states.size() * sizeof(double)) == 0;
        mismatched += same ? 0 : 1;
    }
    report("truncation_inactivity", mismatched == 0, fmt("%zu/1000 paths differ", mismatched));
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string without_runtime(const std::string& json) {
    std::istringstream in(json);
    std::string kept;
    for (std::string line; std::getline(in, line);) {
        if (line.find("\"runtime_seconds\"") == std::string::npos) {
            kept += line + '\n';
        }
    }
    return kept;
}

void check_determinism() {
    const fs::path root = fs::temp_directory_path() / "sis_acceptance_determinism";
    fs::remove_all(root);
    std::string csv[2];
    std::string json[2];
    int codes[2] = {-1, -1};
    const char* threads[2] = {"1", "4"};
    for (int r = 0; r < 2; ++r) {
        const fs::path out = root / threads[r];
        const std::vector<std::string> args{"converge", "--threads", threads[r], "--out", out.string()};
        std::ostringstream sink;
        codes[r] = cli::run(args, sink, sink);
        csv[r] = slurp(out / "convergence.csv");
        json[r] = without_runtime(slurp(out / "convergence_summary.json"));
    }
    fs::remove_all(root);
    const bool pass = codes[0] == 0 && codes[1] == 0 && !csv[0].empty() && csv[0] == csv[1] && json[0] == json[1];
    report("determinism", pass,
           fmt("exit codes %d/%d, CSV %s, JSON (runtime_seconds excluded) %s", codes[0], codes[1],
               csv[0] == csv[1] ? "identical" : "differ", json[0] == json[1] ? "identical" : "differ"));
}

// First grid point where f turns positive, on an n-point grid produced by `at`.
std::pair<double, double> bracket(const std::function<double(double)>& f, const std::function<double(int)>& at,
                                  int n) {
    double prev = at(0);
    for (int k = 1; k < n; ++k) {
        const double x = at(k);
        if (f(x) > 0.0) {
            return {prev, x};
        }
        prev = x;
    }
    return {std::nan(""), std::nan("")};
}

void check_threshold_solver() {
    const SisParams p = example(0.035);
    const double k = default_cap_multiplier(p);
    const DeltaThreshold t = delta_threshold(p, k, ThresholdKind::StarA);
    const auto excess = [&](double dt) { return h_of_delta(p, k, dt) - t.rhs; };

    constexpr int n = 1000000;
    const double lo_exp = -20.0;
    const auto coarse = bracket(
        excess, [&](int i) { return std::pow(10.0, lo_exp - lo_exp * i / (n - 1.0)); }, n);
    const auto fine = bracket(
        excess, [&](int i) { return coarse.first + (coarse.second - coarse.first) * i / (n - 1.0); }, n);
    const double scan = 0.5 * (fine.first + fine.second);
    const double rel = std::abs(t.value - scan) / scan;
    report("delta_star_solver", t.status == DeltaThreshold::Status::Root && rel <= kThresholdRelTol,
           fmt("bisection %.12g, grid scan %.12g, rel diff %.3g", t.value, scan, rel));
}

}  // namespace

int main() {
    check_round_trip();
    check_ito();
    check_positivity();
    check_convergence();
    check_small_noise_extinction();
    check_large_noise_extinction();
    check_truncation_inactivity();
    check_determinism();
    check_threshold_solver();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
