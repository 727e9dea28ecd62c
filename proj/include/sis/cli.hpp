// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sis/harness.hpp"
#include "sis/model.hpp"
#include "sis/schemes.hpp"

namespace sis::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3, kNumericalError = 4 };

enum class Scale { Desk, Paper };

/// Everything a subcommand needs. Keys of the JSON config file and long CLI
/// flags share these names; flags win over the file, the file wins over the
/// scale preset.
struct RunConfig {
    SisParams params{.beta = 0.5, .mu = 20.0, .gamma = 25.0, .sigma = 0.035, .cap_n = 100.0, .i0 = 1.0};
    SchemeKind scheme = SchemeKind::LogTEM;
    Scale scale = Scale::Desk;
    std::vector<int> step_exponents;
    int reference_exponent = 15;
    double p = 5.0;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<std::size_t> paths;
    std::uint64_t seed = 20220501;
    std::optional<double> cap_multiplier;
    HForm h_form = HForm::AsDerived;
    double threshold = 1e-3;
    std::size_t stride = 1;
    unsigned threads = 0;
    bool dump_increments = false;
    bool json = false;
    std::filesystem::path out = "out";
};

/// Applies the convergence preset for `scale` (exponents, reference, p, M, T).
void apply_scale(RunConfig& config, Scale scale);

/// Overlays flat keys from a JSON object. Throws ConfigError on unknown keys
/// or wrongly typed values.
void apply_json(RunConfig& config, const nlohmann::json& doc);

[[nodiscard]] ConvergenceSetup convergence_setup(const RunConfig& config);
[[nodiscard]] ExtinctionSetup extinction_setup(const RunConfig& config);
[[nodiscard]] SchemeConfig simulation_scheme(const RunConfig& config);

int cmd_params(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_converge(const RunConfig& config, std::ostream& out);
int cmd_extinct(const RunConfig& config, std::ostream& out);

/// Parses `args` (without the program name), runs the subcommand and maps
/// errors to ExitCode values. Diagnostics go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace sis::cli
