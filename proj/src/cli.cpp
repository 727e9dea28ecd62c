// SPDX-License-Identifier: Apache-2.0
#include "sis/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "sis/errors.hpp"
#include "sis/paths.hpp"
#include "sis/report_io.hpp"

namespace sis::cli {

namespace {

constexpr int kDefaultSimulateExponent = 6;  // dt = 2^-6
constexpr double kDefaultExtinctionDt = 1e-2;
constexpr double kDefaultLongHorizon = 50.0;
constexpr std::size_t kDefaultSimulatePaths = 10;
constexpr std::size_t kDefaultExtinctionPaths = 100;

std::optional<Scale> parse_scale(std::string_view s) {
    if (s == "desk") return Scale::Desk;
    if (s == "paper") return Scale::Paper;
    return std::nullopt;
}

template <class T>
T json_value(const nlohmann::json& doc, const std::string& key) {
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

void prepare_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string optional_number(const std::optional<double>& v) {
    return v ? io::format_double(*v) : std::string("n/a");
}

}  // namespace

void apply_scale(RunConfig& config, Scale scale) {
    const ConvergenceSetup preset = scale == Scale::Paper ? paper_convergence_setup() : desk_convergence_setup();
    config.scale = scale;
    config.step_exponents = preset.step_exponents;
    config.reference_exponent = preset.reference_exponent;
    config.p = preset.p;
    config.paths.reset();
    config.horizon.reset();
}

void apply_json(RunConfig& config, const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config file must hold a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "beta") config.params.beta = json_value<double>(doc, key);
        else if (key == "mu") config.params.mu = json_value<double>(doc, key);
        else if (key == "gamma") config.params.gamma = json_value<double>(doc, key);
        else if (key == "sigma") config.params.sigma = json_value<double>(doc, key);
        else if (key == "N") config.params.cap_n = json_value<double>(doc, key);
        else if (key == "i0") config.params.i0 = json_value<double>(doc, key);
        else if (key == "scheme") {
            const auto kind = parse_scheme(json_value<std::string>(doc, key));
            if (!kind) throw ConfigError("scheme must be one of em, logem, logtem");
            config.scheme = *kind;
        } else if (key == "scale") {
            // handled before presets are applied
            if (!parse_scale(json_value<std::string>(doc, key))) throw ConfigError("scale must be desk or paper");
        } else if (key == "step_exponents") config.step_exponents = json_value<std::vector<int>>(doc, key);
        else if (key == "reference_exponent") config.reference_exponent = json_value<int>(doc, key);
        else if (key == "p") config.p = json_value<double>(doc, key);
        else if (key == "dt") config.dt = json_value<double>(doc, key);
        else if (key == "horizon") config.horizon = json_value<double>(doc, key);
        else if (key == "paths") config.paths = json_value<std::size_t>(doc, key);
        else if (key == "seed") config.seed = json_value<std::uint64_t>(doc, key);
        else if (key == "K") config.cap_multiplier = json_value<double>(doc, key);
        else if (key == "h_form") {
            const auto form = parse_h_form(json_value<std::string>(doc, key));
            if (!form) throw ConfigError("h_form must be printed or derived");
            config.h_form = *form;
        } else if (key == "threshold") config.threshold = json_value<double>(doc, key);
        else if (key == "stride") config.stride = json_value<std::size_t>(doc, key);
        else if (key == "threads") config.threads = json_value<unsigned>(doc, key);
        else if (key == "dump_increments") config.dump_increments = json_value<bool>(doc, key);
        else if (key == "json") config.json = json_value<bool>(doc, key);
        else if (key == "out") config.out = json_value<std::string>(doc, key);
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

ConvergenceSetup convergence_setup(const RunConfig& config) {
    const ConvergenceSetup preset =
        config.scale == Scale::Paper ? paper_convergence_setup() : desk_convergence_setup();
    ConvergenceSetup s;
    s.kind = config.scheme;
    s.step_exponents = config.step_exponents;
    s.reference_exponent = config.reference_exponent;
    s.p = config.p;
    s.m_paths = config.paths.value_or(preset.m_paths);
    s.t_final = config.horizon.value_or(preset.t_final);
    s.seed = config.seed;
    s.cap_multiplier = config.cap_multiplier;
    s.threads = config.threads;
    return s;
}

ExtinctionSetup extinction_setup(const RunConfig& config) {
    ExtinctionSetup s;
    s.scheme = SchemeConfig::with_step(config.scheme, config.dt.value_or(kDefaultExtinctionDt),
                                       config.horizon.value_or(kDefaultLongHorizon));
    s.scheme.cap_multiplier = config.cap_multiplier;
    s.m_paths = config.paths.value_or(kDefaultExtinctionPaths);
    s.extinction_threshold = config.threshold;
    s.seed = config.seed;
    s.h_form = config.h_form;
    s.threads = config.threads;
    return s;
}

SchemeConfig simulation_scheme(const RunConfig& config) {
    const double horizon = config.horizon.value_or(kDefaultLongHorizon);
    SchemeConfig c = config.dt ? SchemeConfig::with_step(config.scheme, *config.dt, horizon)
                               : SchemeConfig::dyadic(config.scheme, kDefaultSimulateExponent, horizon);
    c.cap_multiplier = config.cap_multiplier;
    c.record_stride = config.stride;
    return c;
}

int cmd_params(const RunConfig& config, std::ostream& out) {
    const DerivedQuantities d = derive(config.params);
    const double k = config.cap_multiplier.value_or(default_cap_multiplier(config.params));
    std::optional<DeltaThreshold> threshold;
    if (d.regime == Regime::ExtinctSmallNoise) {
        threshold = delta_threshold(config.params, k, ThresholdKind::StarA);
    } else if (d.regime == Regime::ExtinctLargeNoise) {
        threshold = delta_threshold(config.params, k, ThresholdKind::StarB);
    }

    if (config.json) {
        out << io::params_summary(config.params, d, threshold).dump(2) << '\n';
        return kOk;
    }
    out << "eta          " << io::format_double(d.eta) << '\n'
        << "R0_det       " << optional_number(d.r0_det) << '\n'
        << "R0_stoch     " << optional_number(d.r0_stoch) << '\n'
        << "ext_bound_a  " << io::format_double(d.ext_bound_a) << '\n'
        << "ext_bound_b  " << optional_number(d.ext_bound_b) << '\n'
        << "regime       " << to_string(d.regime) << '\n'
        << "K            " << io::format_double(k) << '\n';
    if (threshold) {
        const char* name = d.regime == Regime::ExtinctSmallNoise ? "delta_star   " : "delta_star2  ";
        out << name;
        switch (threshold->status) {
            case DeltaThreshold::Status::Absent: out << "none"; break;
            case DeltaThreshold::Status::Root: out << io::format_double(threshold->value); break;
            case DeltaThreshold::Status::AllAdmissible: out << "all dt in (0,1) admissible"; break;
        }
        out << '\n';
    }
    return kOk;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
    const SchemeConfig scheme = simulation_scheme(config);
    scheme.validate(config.params);
    const std::size_t paths = config.paths.value_or(kDefaultSimulatePaths);
    prepare_out_dir(config.out);

    io::write_json(config.out / "params.json", io::params_summary(config.params, derive(config.params), std::nullopt));

    std::size_t exits = 0;
    std::size_t truncations = 0;
    for (std::size_t j = 0; j < paths; ++j) {
        const BrownianGrid grid =
            scheme.step_exponent ? generate(config.seed, j, *scheme.step_exponent, scheme.horizon)
                                 : generate_with_step(config.seed, j, scheme.dt, scheme.horizon);
        const TrajectoryRecord rec = run_trajectory(config.params, scheme, grid);
        char name[48];
        std::snprintf(name, sizeof name, "path_%05zu.csv", j);
        io::write_trajectory_csv(config.out / name, rec);
        if (config.dump_increments) {
            std::snprintf(name, sizeof name, "increments_%05zu.bin", j);
            write_increment_dump(config.out / name, grid);
        }
        exits += rec.domain_exit ? 1 : 0;
        truncations += rec.truncation_count;
    }
    out << "wrote " << paths << " trajectories to " << config.out.string() << " (scheme " << to_string(scheme.kind)
        << ", dt " << io::format_double(scheme.dt) << ", truncations " << truncations << ", domain exits " << exits
        << ")\n";
    return kOk;
}

int cmd_converge(const RunConfig& config, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const DerivedQuantities d = derive(config.params);
    const ConvergenceReport report = strong_error_study(config.params, convergence_setup(config));
    prepare_out_dir(config.out);
    io::write_convergence_csv(config.out / "convergence.csv", report);
    io::write_json(config.out / "convergence_summary.json", io::convergence_summary(report, d, seconds_since(start)));

    for (std::size_t l = 0; l < report.step_exponents.size(); ++l) {
        out << "dt = 2^-" << report.step_exponents[l] << "  Error(" << report.p
            << ") = " << io::format_double(report.errors_p[l]) << '\n';
    }
    out << "fitted slope " << io::format_double(report.fit.slope) << ", r^2 " << io::format_double(report.fit.r2)
        << '\n';
    if (std::isnan(report.fit.slope)) {
        return kNumericalError;
    }
    return kOk;
}

int cmd_extinct(const RunConfig& config, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const ExtinctionReport report = extinction_study(config.params, extinction_setup(config));
    prepare_out_dir(config.out);
    io::write_extinction_csv(config.out / "extinction.csv", report);
    io::write_json(config.out / "extinction_summary.json", io::extinction_summary(report, seconds_since(start)));

    out << "regime " << to_string(report.regime) << '\n'
        << "finite-horizon exponent proxy: mean " << io::format_double(report.mean_exponent) << ", median "
        << io::format_double(report.median_exponent) << '\n'
        << "fraction below " << io::format_double(report.extinction_threshold) << ": "
        << io::format_double(report.fraction_below_threshold) << '\n'
        << "h(dt) [" << to_string(report.h_form) << "] " << io::format_double(report.h_value) << '\n'
        << "theoretical bound " << optional_number(report.theoretical_bound) << '\n';
    return kOk;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        // The config file and scale preset must be known before flags are bound.
        std::optional<std::string> config_file;
        std::optional<std::string> scale_flag;
        for (std::size_t i = 0; i < args.size(); ++i) {
            const std::string& a = args[i];
            if ((a == "--config" || a == "--scale") && i + 1 < args.size()) {
                (a == "--config" ? config_file : scale_flag) = args[i + 1];
            } else if (a.rfind("--config=", 0) == 0) {
                config_file = a.substr(9);
            } else if (a.rfind("--scale=", 0) == 0) {
                scale_flag = a.substr(8);
            } else if (a == "--paper-scale") {
                scale_flag = "paper";
            }
        }
        nlohmann::json doc = nlohmann::json::object();
        if (config_file) {
            std::ifstream in(*config_file);
            if (!in) {
                throw ConfigError("cannot read config file " + *config_file);
            }
            try {
                doc = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
            }
        }
        std::string scale_name = scale_flag.value_or("desk");
        if (!scale_flag && doc.is_object() && doc.contains("scale") && doc["scale"].is_string()) {
            scale_name = doc["scale"].get<std::string>();
        }
        const auto scale = parse_scale(scale_name);
        if (!scale) {
            throw ConfigError("scale must be desk or paper");
        }
        apply_scale(config, *scale);
        apply_json(config, doc);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    CLI::App app{"Logarithmic truncated Euler-Maruyama simulation of the stochastic SIS model"};
    app.fallthrough();
    app.require_subcommand(1);
    auto* params_cmd = app.add_subcommand("params", "print derived quantities, regime and step thresholds");
    auto* simulate_cmd = app.add_subcommand("simulate", "write sample-path CSVs (t,y,I,truncated)");
    auto* converge_cmd = app.add_subcommand("converge", "strong-error study with a fitted log2-log2 slope");
    auto* extinct_cmd = app.add_subcommand("extinct", "finite-horizon extinction diagnostics");

    std::string config_path;
    std::string scale_name;
    std::string scheme_name{to_string(config.scheme)};
    std::string h_form_name{to_string(config.h_form)};
    std::string out_dir = config.out.string();
    double dt = 0.0;
    double horizon = 0.0;
    std::size_t paths = 0;
    double cap = 0.0;

    app.add_option("--config", config_path, "JSON file with flat keys named like the flags");
    app.add_option("--scale", scale_name, "convergence preset")->check(CLI::IsMember({"desk", "paper"}));
    app.add_flag("--paper-scale", "shorthand for --scale paper");
    app.add_option("--beta", config.params.beta, "transmission coefficient");
    app.add_option("--mu", config.params.mu, "per-capita death rate");
    app.add_option("--gamma", config.params.gamma, "cure rate");
    app.add_option("--sigma", config.params.sigma, "noise intensity");
    app.add_option("--N", config.params.cap_n, "total population");
    app.add_option("--i0", config.params.i0, "initial infected count");
    app.add_option("--scheme", scheme_name, "integrator")->check(CLI::IsMember({"em", "logem", "logtem"}));
    app.add_option("--step_exponents,--step-exponents", config.step_exponents, "coarse levels l (dt = 2^-l)")
        ->delimiter(',');
    app.add_option("--reference_exponent,--reference-exponent", config.reference_exponent, "reference level");
    app.add_option("--p", config.p, "moment order of Error(p)");
    auto* dt_opt = app.add_option("--dt", dt, "explicit step size (simulate, extinct)");
    auto* horizon_opt = app.add_option("--horizon", horizon, "final time T in days");
    auto* paths_opt = app.add_option("--paths", paths, "number of trajectories M");
    app.add_option("--seed", config.seed, "master seed");
    auto* cap_opt = app.add_option("--K", cap, "truncation constant K (default 2(1+e^Y0))");
    app.add_option("--h_form,--h-form", h_form_name, "h(dt) variant")->check(CLI::IsMember({"printed", "derived"}));
    app.add_option("--threshold", config.threshold, "extinction threshold in individuals");
    app.add_option("--stride", config.stride, "record every stride-th step (0: endpoints only)");
    app.add_option("--threads", config.threads, "worker threads (0: all cores)");
    app.add_flag("--dump_increments,--dump-increments", config.dump_increments, "write binary increment dumps");
    app.add_flag("--json", config.json, "params: print JSON");
    app.add_option("--out", out_dir, "output directory");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("sis_tem");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    config.scheme = *parse_scheme(scheme_name);
    config.h_form = *parse_h_form(h_form_name);
    config.out = out_dir;
    if (dt_opt->count() > 0) config.dt = dt;
    if (horizon_opt->count() > 0) config.horizon = horizon;
    if (paths_opt->count() > 0) config.paths = paths;
    if (cap_opt->count() > 0) config.cap_multiplier = cap;

    try {
        config.params.validate();
        if (params_cmd->parsed()) return cmd_params(config, out);
        if (simulate_cmd->parsed()) return cmd_simulate(config, out);
        if (converge_cmd->parsed()) return cmd_converge(config, out);
        if (extinct_cmd->parsed()) return cmd_extinct(config, out);
    } catch (const InvalidParams& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const RegimeError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ExponentError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const Error& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    }
    return kConfigError;
}

}  // namespace sis::cli
