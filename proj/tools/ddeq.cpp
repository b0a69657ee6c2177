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

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ddeq/cli.hpp"

namespace {

struct Common {
    std::string spec;
    std::string out = ".";
    std::optional<std::string> normalize;
};

std::optional<ddeq::Normalization> parse_normalize(const std::optional<std::string>& v)
{
    if (!v) {
        return std::nullopt;
    }
    return *v == "strict" ? ddeq::Normalization::strict : ddeq::Normalization::automatic;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ddeq: linear distributed-delay equations with phase-type kernels"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ddeq 0.1.0");

    Common common;
    ddeq::RunOverrides overrides;
    std::optional<std::string> method;
    double eps = 0.01;
    std::optional<double> norm_ratio;
    std::string model_kind;

    auto add_spec = [&](CLI::App* sub) {
        sub->add_option("spec", common.spec, "problem spec (JSON, schema ddeq/1)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", common.out, "output directory")->capture_default_str();
        sub->add_option("--normalize", common.normalize, "kernel normalization")
            ->check(CLI::IsMember({"strict", "auto"}));
    };

    auto* validate = app.add_subcommand("validate", "parse and validate a spec");
    add_spec(validate);
    auto* augment = app.add_subcommand("augment", "write the augmented matrix as sparse triplets");
    add_spec(augment);
    auto* stability = app.add_subcommand("stability", "semi-stability and Hermitian-part checks");
    add_spec(stability);
    auto* solve = app.add_subcommand("solve", "integrate and write trajectory.csv and report.json");
    add_spec(solve);
    solve->add_option("--method", method, "dde-direct | lct-ode | schrodingerize")
        ->check(CLI::IsMember({"dde-direct", "lct-ode", "schrodingerize"}));
    solve->add_option("--t-end", overrides.t_end, "final time");
    solve->add_option("--step", overrides.step, "output spacing");
    solve->add_option("--np", overrides.points, "number of p grid points (power of two)");
    solve->add_option("--eps-grid", overrides.eps_grid, "grid tolerance in (0, 1)");
    solve->add_flag("--allow-shift", overrides.allow_shift, "shift an indefinite Hermitian part and rescale");
    auto* complexity = app.add_subcommand("complexity", "query and gate complexity estimate");
    add_spec(complexity);
    complexity->add_option("--eps", eps, "target precision in (0, 1)")->capture_default_str();
    complexity->add_option("--t-end", overrides.t_end, "evolution time");
    complexity->add_option("--norm-ratio", norm_ratio, "use this ||x(0)||/||x(t)|| instead of solving");
    auto* model = app.add_subcommand("model", "build a gme or redfield model into an explicit system spec");
    model->add_option("kind", model_kind, "gme | redfield")->required()->check(CLI::IsMember({"gme", "redfield"}));
    add_spec(model);

    CLI11_PARSE(app, argc, argv);

    try {
        ddeq::ProblemSpec spec = ddeq::load_spec(common.spec);
        if (method) {
            overrides.method = ddeq::parse_method(*method);
        }
        overrides.normalization = parse_normalize(common.normalize);
        ddeq::apply_overrides(spec.run, overrides);

        ddeq::CommandOutput result;
        if (*validate) {
            result = ddeq::cmd_validate(spec);
        } else if (*augment) {
            result = ddeq::cmd_augment(spec, common.out);
        } else if (*stability) {
            result = ddeq::cmd_stability(spec, common.out);
        } else if (*solve) {
            result = ddeq::cmd_solve(spec, common.out);
        } else if (*complexity) {
            result = ddeq::cmd_complexity(spec, eps, norm_ratio, common.out);
        } else {
            result = ddeq::cmd_model(spec, model_kind == "gme" ? ddeq::ModelKind::gme : ddeq::ModelKind::redfield,
                                     common.out);
        }
        (result.exit_code == ddeq::kExitOk ? std::cout : std::cerr) << result.summary << '\n';
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ddeq::exit_code_for(e);
    }
}
