// Copyright 2026 The ddeq Authors
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

#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ddeq/problem_spec.hpp"
#include "ddeq/schrodingerizer.hpp"
#include "ddeq/stability.hpp"

namespace ddeq {

enum ExitCode : int {
    kExitOk = 0,
    kExitSpecError = 1,
    kExitGateRefusal = 2,
    kExitNumericalFailure = 3,
};

/// Command-line values that take precedence over the spec's `run` section.
struct RunOverrides {
    std::optional<SolveMethod> method;
    std::optional<double> t_end;
    std::optional<double> step;
    std::optional<double> eps_grid;
    std::optional<Index> points;
    bool allow_shift = false;
    std::optional<Normalization> normalization;
};

void apply_overrides(RunSettings& run, const RunOverrides& overrides);

struct CommandOutput {
    int exit_code = kExitOk;
    nlohmann::json report;
    std::string summary;  ///< one or two lines for the terminal
};

CommandOutput cmd_validate(const ProblemSpec& spec);
/// Writes cbar.csv (row,col,re,im; zero-based) and layout.json.
CommandOutput cmd_augment(const ProblemSpec& spec, const std::filesystem::path& out_dir);
/// Writes stability.json; exit 2 when the augmented matrix is not semi-stable.
CommandOutput cmd_stability(const ProblemSpec& spec, const std::filesystem::path& out_dir);
/// Writes trajectory.csv and report.json.
CommandOutput cmd_solve(const ProblemSpec& spec, const std::filesystem::path& out_dir);
/// Writes complexity.json. Without `norm_ratio` the ratio ||x(0)|| / ||x(t_end)|| comes from the ODE oracle.
CommandOutput cmd_complexity(const ProblemSpec& spec, double eps, std::optional<double> norm_ratio,
                             const std::filesystem::path& out_dir);
/// Writes system.json, the built model as an explicit system spec. Fails if the spec is not of `expected` kind.
CommandOutput cmd_model(const ProblemSpec& spec, ModelKind expected, const std::filesystem::path& out_dir);

/// Maps library exceptions onto exit codes.
int exit_code_for(const std::exception& e);

nlohmann::json to_json(const StabilityReport& report);
nlohmann::json to_json(const ComplexityReport& report);
nlohmann::json to_json(const SchrodGrid& grid);

std::string utc_timestamp();

}  // namespace ddeq
