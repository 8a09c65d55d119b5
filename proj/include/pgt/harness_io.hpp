// Copyright the pgt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pgt/harness.hpp"

namespace pgt {

/// Matrix literal: {"dim": d, "entries": [[re, im], ...]} row-major.
HermitianMatrix parse_matrix_literal(const nlohmann::json& j,
                                     const std::string& context);
nlohmann::json matrix_literal(const HermitianMatrix& m);

MeasurementSource parse_source(const nlohmann::json& j,
                               const std::string& context);
nlohmann::json source_to_json(const MeasurementSource& s);

/// Parses and validates an experiment spec. Unknown keys are an error that
/// names them; schema violations carry the offending path.
ExperimentSpec parse_spec(const nlohmann::json& j);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

ExperimentSpec load_spec(const std::filesystem::path& path);

nlohmann::json report_to_json(const Report& report);
/// The deterministic comparison payload: the report JSON with wall-clock
/// fields removed.
nlohmann::json report_body(const Report& report);
std::string report_to_csv(const Report& report);

/// Writes report.json and rows.csv under dir, atomically (temp file plus
/// rename).
void emit_report(const Report& report, const std::filesystem::path& dir);

}  // namespace pgt
