// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "sis/harness.hpp"
#include "sis/model.hpp"
#include "sis/schemes.hpp"

namespace sis::io {

/// %.17g; enough digits to restore the exact double.
[[nodiscard]] std::string format_double(double v);

/// Header `t,y,I,truncated`; y is empty for ClassicalEM.
void write_trajectory_csv(const std::filesystem::path& file, const TrajectoryRecord& record);

/// Header `step_exponent,dt,error`, one row per step size.
void write_convergence_csv(const std::filesystem::path& file, const ConvergenceReport& report);

/// Header `path,exponent,log_I_T,below_threshold`, one row per path.
void write_extinction_csv(const std::filesystem::path& file, const ExtinctionReport& report);

/// Summary documents share the keys slope, errors, bound, h, regime and
/// runtime_seconds (null where not applicable) plus a `kind` discriminator.
/// runtime_seconds is always the last key.
[[nodiscard]] nlohmann::ordered_json convergence_summary(const ConvergenceReport& report,
                                                         const DerivedQuantities& derived,
                                                         double runtime_seconds);
[[nodiscard]] nlohmann::ordered_json extinction_summary(const ExtinctionReport& report, double runtime_seconds);
[[nodiscard]] nlohmann::ordered_json params_summary(const SisParams& params, const DerivedQuantities& derived,
                                                    const std::optional<DeltaThreshold>& threshold);

/// Returns an error message when `doc` does not satisfy the summary schema.
[[nodiscard]] std::optional<std::string> validate_summary(const nlohmann::json& doc);

void write_json(const std::filesystem::path& file, const nlohmann::ordered_json& doc);

}  // namespace sis::io
