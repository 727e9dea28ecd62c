// SPDX-License-Identifier: Apache-2.0
#include "sis/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sis/errors.hpp"

namespace sis::io {

namespace {

std::ofstream open_for_write(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + file.string() + " for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& file) {
    out.flush();
    if (!out) {
        throw IoError("write failed for " + file.string());
    }
}

nlohmann::ordered_json number_or_null(std::optional<double> v) {
    if (v && std::isfinite(*v)) {
        return *v;
    }
    return nullptr;
}

nlohmann::ordered_json threshold_json(const std::optional<DeltaThreshold>& t) {
    if (!t) {
        return nullptr;
    }
    nlohmann::ordered_json j;
    switch (t->status) {
        case DeltaThreshold::Status::Absent: j["status"] = "absent"; break;
        case DeltaThreshold::Status::Root: j["status"] = "root"; break;
        case DeltaThreshold::Status::AllAdmissible: j["status"] = "all_admissible"; break;
    }
    j["value"] = t->status == DeltaThreshold::Status::Absent ? nlohmann::ordered_json(nullptr)
                                                             : nlohmann::ordered_json(t->value);
    j["rhs"] = t->rhs;
    return j;
}

bool is_number_or_null(const nlohmann::json& j) { return j.is_null() || j.is_number(); }

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(const std::filesystem::path& file, const TrajectoryRecord& record) {
    auto out = open_for_write(file);
    out << "t,y,I,truncated\n";
    for (std::size_t k = 0; k < record.times.size(); ++k) {
        out << format_double(record.times[k]) << ',';
        if (record.y_states) {
            out << format_double((*record.y_states)[k]);
        }
        out << ',' << format_double(record.i_states[k]) << ',' << static_cast<int>(record.truncated[k]) << '\n';
    }
    finish(out, file);
}

void write_convergence_csv(const std::filesystem::path& file, const ConvergenceReport& report) {
    auto out = open_for_write(file);
    out << "step_exponent,dt,error\n";
    for (std::size_t l = 0; l < report.step_exponents.size(); ++l) {
        const int e = report.step_exponents[l];
        out << e << ',' << format_double(std::ldexp(1.0, -e)) << ',' << format_double(report.errors_p[l]) << '\n';
    }
    finish(out, file);
}

void write_extinction_csv(const std::filesystem::path& file, const ExtinctionReport& report) {
    auto out = open_for_write(file);
    out << "path,exponent,log_I_T,below_threshold\n";
    const double log_threshold = std::log(report.extinction_threshold);
    for (std::size_t j = 0; j < report.exponent_estimates.size(); ++j) {
        out << j << ',' << format_double(report.exponent_estimates[j]) << ','
            << format_double(report.final_log_infected[j]) << ','
            << (report.final_log_infected[j] < log_threshold ? 1 : 0) << '\n';
    }
    finish(out, file);
}

nlohmann::ordered_json convergence_summary(const ConvergenceReport& report, const DerivedQuantities& derived,
                                           double runtime_seconds) {
    nlohmann::ordered_json j;
    j["kind"] = "convergence";
    j["slope"] = number_or_null(report.fit.slope);
    j["intercept"] = number_or_null(report.fit.intercept);
    j["r2"] = number_or_null(report.fit.r2);
    j["errors"] = report.errors_p;
    j["step_exponents"] = report.step_exponents;
    j["reference_exponent"] = report.reference_exponent;
    j["p"] = report.p;
    j["paths"] = report.m_paths;
    j["horizon"] = report.t_final;
    j["seed"] = report.seed;
    j["scheme"] = std::string(to_string(report.kind));
    std::optional<double> bound;
    if (derived.regime == Regime::ExtinctSmallNoise) {
        bound = derived.ext_bound_a;
    } else if (derived.regime == Regime::ExtinctLargeNoise) {
        bound = derived.ext_bound_b;
    }
    j["bound"] = number_or_null(bound);
    j["h"] = nullptr;
    j["regime"] = std::string(to_string(derived.regime));
    j["runtime_seconds"] = runtime_seconds;
    return j;
}

nlohmann::ordered_json extinction_summary(const ExtinctionReport& report, double runtime_seconds) {
    nlohmann::ordered_json j;
    j["kind"] = "extinction";
    j["slope"] = nullptr;
    j["errors"] = nlohmann::ordered_json::array();
    j["statistic"] = "finite-horizon exponent proxy";
    j["mean_exponent"] = report.mean_exponent;
    j["median_exponent"] = report.median_exponent;
    j["fraction_below_threshold"] = report.fraction_below_threshold;
    j["extinction_threshold"] = report.extinction_threshold;
    j["paths"] = report.exponent_estimates.size();
    j["dt"] = report.dt;
    j["horizon"] = report.horizon;
    j["K"] = report.cap_multiplier;
    j["truncations"] = report.truncation_total;
    j["h_form"] = std::string(to_string(report.h_form));
    j["delta_star"] = threshold_json(report.delta_star);
    j["bound"] = number_or_null(report.theoretical_bound);
    j["h"] = number_or_null(report.h_value);
    j["regime"] = std::string(to_string(report.regime));
    j["runtime_seconds"] = runtime_seconds;
    return j;
}

nlohmann::ordered_json params_summary(const SisParams& params, const DerivedQuantities& derived,
                                      const std::optional<DeltaThreshold>& threshold) {
    nlohmann::ordered_json j;
    j["beta"] = params.beta;
    j["mu"] = params.mu;
    j["gamma"] = params.gamma;
    j["sigma"] = params.sigma;
    j["N"] = params.cap_n;
    j["i0"] = params.i0;
    j["eta"] = derived.eta;
    j["r0_det"] = number_or_null(derived.r0_det);
    j["r0_stoch"] = number_or_null(derived.r0_stoch);
    j["ext_bound_a"] = derived.ext_bound_a;
    j["ext_bound_b"] = number_or_null(derived.ext_bound_b);
    j["regime"] = std::string(to_string(derived.regime));
    j["delta_star"] = threshold_json(threshold);
    return j;
}

std::optional<std::string> validate_summary(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        return "summary must be a JSON object";
    }
    for (const char* key : {"kind", "slope", "errors", "bound", "h", "regime", "runtime_seconds"}) {
        if (!doc.contains(key)) {
            return std::string("missing key: ") + key;
        }
    }
    const auto& kind = doc["kind"];
    if (!kind.is_string() || (kind != "convergence" && kind != "extinction")) {
        return "kind must be \"convergence\" or \"extinction\"";
    }
    for (const char* key : {"slope", "bound", "h"}) {
        if (!is_number_or_null(doc[key])) {
            return std::string(key) + " must be a number or null";
        }
    }
    if (!doc["errors"].is_array()) {
        return "errors must be an array";
    }
    for (const auto& e : doc["errors"]) {
        if (!is_number_or_null(e)) {
            return "errors must hold numbers";
        }
    }
    const auto& regime = doc["regime"];
    if (!regime.is_string() ||
        (regime != "ExtinctSmallNoise" && regime != "ExtinctLargeNoise" && regime != "Unclassified")) {
        return "regime must name a known regime";
    }
    if (!doc["runtime_seconds"].is_number() || doc["runtime_seconds"].get<double>() < 0.0) {
        return "runtime_seconds must be a non-negative number";
    }
    if (kind == "convergence") {
        if (!doc.contains("step_exponents") || !doc["step_exponents"].is_array() ||
            doc["step_exponents"].size() != doc["errors"].size()) {
            return "step_exponents must pair with errors";
        }
    } else {
        for (const char* key : {"mean_exponent", "median_exponent", "fraction_below_threshold"}) {
            if (!doc.contains(key) || !doc[key].is_number()) {
                return std::string(key) + " must be a number";
            }
        }
    }
    return std::nullopt;
}

void write_json(const std::filesystem::path& file, const nlohmann::ordered_json& doc) {
    auto out = open_for_write(file);
    out << doc.dump(2) << '\n';
    finish(out, file);
}

}  // namespace sis::io
