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

#include "ddeq/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ddeq/errors.hpp"
#include "ddeq/reference.hpp"
#include "ddeq/trajectory.hpp"

namespace ddeq {

using nlohmann::json;

namespace {

// Dense eigen-analysis of the augmented matrix is skipped above this size.
constexpr Index kDenseAnalysisLimit = 2000;

json complex_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

void write_json(const std::filesystem::path& path, const json& doc)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

void prepare(const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
    }
}

json system_summary(const ProblemSpec& spec, const AugmentedSystem& aug)
{
    static const char* kinds[] = {"system", "gme", "redfield"};
    return json{{"source", kinds[static_cast<int>(spec.kind)]},
                {"n", spec.system.n()},
                {"terms", spec.system.terms().size()},
                {"g", aug.layout.g},
                {"s", aug.layout.s},
                {"markov_sparsity", aug.markov_sparsity},
                {"memory_sparsity", aug.memory_sparsity},
                {"augmented_dimension", aug.layout.dimension()},
                {"cbar_max_norm", max_norm(aug.Cbar)}};
}

std::optional<StabilityReport> dense_stability(const AugmentedSystem& aug)
{
    if (aug.Cbar.rows() > kDenseAnalysisLimit) {
        return std::nullopt;
    }
    return semistability_of_matrix(ComplexMatrix(aug.Cbar));
}

double safe_ratio(double a, double b)
{
    return b > 0.0 ? a / b : std::numeric_limits<double>::infinity();
}

}  // namespace

void apply_overrides(RunSettings& run, const RunOverrides& o)
{
    if (o.method) {
        run.method = *o.method;
    }
    if (o.t_end) {
        if (!(*o.t_end >= 0.0)) {
            throw DomainError("--t-end must be non-negative");
        }
        run.t_end = *o.t_end;
        run.times.clear();
    }
    if (o.step) {
        if (!(*o.step > 0.0)) {
            throw DomainError("--step must be positive");
        }
        run.step = *o.step;
        run.times.clear();
    }
    if (o.eps_grid) {
        if (!(*o.eps_grid > 0.0 && *o.eps_grid < 1.0)) {
            throw DomainError("--eps-grid must lie in (0, 1)");
        }
        run.eps_grid = *o.eps_grid;
    }
    if (o.points) {
        run.points = *o.points;
    }
    if (o.allow_shift) {
        run.allow_shift = true;
    }
    if (o.normalization) {
        run.normalization = *o.normalization;
    }
}

json to_json(const StabilityReport& r)
{
    json eig = json::array();
    for (const auto& z : r.eigenvalues) {
        eig.push_back(complex_json(z));
    }
    json axis = json::array();
    for (const auto& a : r.imaginary_axis) {
        axis.push_back({{"value", complex_json(a.value)},
                        {"algebraic", a.algebraic},
                        {"geometric", a.geometric},
                        {"semi_simple", a.semi_simple()}});
    }
    return json{{"semi_stable", r.semi_stable},
                {"max_real_part", r.max_real_part},
                {"imaginary_axis", axis},
                {"h1_max_eig", r.h1_max_eig},
                {"shift_applied", r.shift_applied},
                {"eigenvalues", eig}};
}

json to_json(const ComplexityReport& r)
{
    return json{{"sparsity_s", r.sparsity_s},
                {"max_norm", r.max_norm},
                {"leading_term", r.leading_term},
                {"log_term", r.log_term},
                {"query_complexity", r.query_complexity},
                {"gate_multiplier", r.gate_multiplier},
                {"norm_ratio", r.norm_ratio},
                {"success_probability", r.success_probability},
                {"hamiltonian_query", r.hamiltonian_query},
                {"warnings", r.warnings}};
}

json to_json(const SchrodGrid& grid)
{
    return json{{"width", grid.width}, {"points", grid.points}, {"dp", grid.dp()}};
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const StabilityGateError*>(&e)) {
        return kExitGateRefusal;
    }
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const ConditioningError*>(&e) ||
        dynamic_cast<const SingularityError*>(&e)) {
        return kExitNumericalFailure;
    }
    return kExitSpecError;
}

CommandOutput cmd_validate(const ProblemSpec& spec)
{
    const AugmentedSystem aug = augment(spec.system, spec.run.normalization);
    CommandOutput out;
    out.report = json{{"valid", true}, {"system", system_summary(spec, aug)}, {"run", to_json(spec.run)}};
    std::ostringstream os;
    os << "valid: N = " << spec.system.n() << ", " << spec.system.terms().size() << " kernel terms, augmented dimension "
       << aug.layout.dimension();
    out.summary = os.str();
    return out;
}

CommandOutput cmd_augment(const ProblemSpec& spec, const std::filesystem::path& out_dir)
{
    prepare(out_dir);
    const AugmentedSystem aug = augment(spec.system, spec.run.normalization);
    {
        std::ofstream csv(out_dir / "cbar.csv");
        if (!csv) {
            throw Error("cannot write " + (out_dir / "cbar.csv").string());
        }
        csv << "row,col,re,im\n";
        char buf[128];
        for (Index k = 0; k < aug.Cbar.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(aug.Cbar, k); it; ++it) {
                std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g,%.17g\n", static_cast<long long>(it.row()),
                              static_cast<long long>(it.col()), it.value().real(), it.value().imag());
                csv << buf;
            }
        }
    }
    json slots = json::array();
    for (const auto& row : aug.layout.slots) {
        json r = json::array();
        for (const auto& s : row) {
            r.push_back({{"term", s.term},
                         {"col", s.col},
                         {"kernel_dim", s.kernel_dim},
                         {"normalized_weight", complex_json(s.normalized_weight)}});
        }
        slots.push_back(r);
    }
    json layout{{"n", aug.layout.n},
                {"g", aug.layout.g},
                {"s", aug.layout.s},
                {"dimension", aug.layout.dimension()},
                {"aux_dimension", aug.layout.aux_dimension()},
                {"slots", slots}};
    write_json(out_dir / "layout.json", layout);
    CommandOutput out;
    out.report = json{{"system", system_summary(spec, aug)}, {"layout", layout}};
    out.summary = "wrote " + (out_dir / "cbar.csv").string() + " (" + std::to_string(aug.Cbar.nonZeros()) +
                  " nonzeros) and " + (out_dir / "layout.json").string();
    return out;
}

CommandOutput cmd_stability(const ProblemSpec& spec, const std::filesystem::path& out_dir)
{
    prepare(out_dir);
    const AugmentedSystem aug = augment(spec.system, spec.run.normalization);
    const ComplexMatrix dense(aug.Cbar);
    const StabilityReport st = semistability_of_matrix(dense);
    const HermitianPartCheck h1 = check_h1_negativity(dense);

    json report{{"timestamp", utc_timestamp()},
                {"system", system_summary(spec, aug)},
                {"augmented", to_json(st)},
                {"h1", {{"max_eig", h1.max_eig}, {"negative_semidefinite", h1.max_eig <= 1e-9}, {"shift", h1.shift}}}};
    if (spec.system.n() <= 16) {
        const RootProbeReport probe = probe_characteristic_roots(spec.system);
        json axis = json::array();
        for (const auto& a : probe.imaginary_axis) {
            axis.push_back({{"value", complex_json(a.value)}, {"algebraic", a.algebraic}, {"geometric", a.geometric}});
        }
        report["characteristic_roots"] = {{"radius", probe.radius},
                                          {"right_half_plane_roots", probe.right_half_plane_roots},
                                          {"imaginary_axis", axis},
                                          {"semi_stable", probe.semi_stable}};
    }
    write_json(out_dir / "stability.json", report);

    CommandOutput out;
    out.report = report;
    out.exit_code = st.semi_stable ? kExitOk : kExitGateRefusal;
    std::ostringstream os;
    os << (st.semi_stable ? "semi-stable" : "NOT semi-stable") << ": max Re eigenvalue " << st.max_real_part;
    for (const auto& a : st.imaginary_axis) {
        if (!a.semi_simple()) {
            os << "; defective imaginary-axis eigenvalue " << a.value << " (algebraic " << a.algebraic
               << ", geometric " << a.geometric << ")";
        }
    }
    os << "; lambda_max(H1) = " << h1.max_eig;
    out.summary = os.str();
    return out;
}

CommandOutput cmd_solve(const ProblemSpec& spec, const std::filesystem::path& out_dir)
{
    prepare(out_dir);
    const RunSettings& run = spec.run;
    const std::vector<double> times = run.output_times();
    const AugmentedSystem aug = augment(spec.system, run.normalization);
    const ComplexVector ybar0 = initial_augmented(spec.x0, aug.layout);

    json report{{"schema", "ddeq-report/1"},
                {"timestamp", utc_timestamp()},
                {"method", to_string(run.method)},
                {"run", to_json(run)},
                {"system", system_summary(spec, aug)}};
    if (const auto st = dense_stability(aug)) {
        report["stability"] = to_json(*st);
    }

    CommandOutput out;
    Trajectory traj;
    try {
        switch (run.method) {
        case SolveMethod::dde_direct: {
            DdeOptions options;
            options.output_times = times;
            traj = solve_dde_direct(spec.system, spec.x0, times.back(), run.dde_step, options);
            break;
        }
        case SolveMethod::lct_ode:
            traj = solve_ode_direct(aug, ybar0, times);
            break;
        case SolveMethod::schrodingerize: {
            SchrodParams params;
            params.eps_grid = run.eps_grid;
            params.points = run.points;
            params.allow_shift = run.allow_shift;
            params.shift_margin = run.shift_margin;
            params.recovery = run.recovery;
            params.normalization = run.normalization;
            SchrodRun res = solve_schrodingerized(aug, ybar0, times, params);
            report["grid"] = to_json(res.grid);
            report["stability"] = to_json(res.stability);
            report["shift"] = res.shift;
            report["unitarity_drift"] = res.unitarity_drift;
            report["boundary_mass"] = res.boundary_mass;
            report["success_probabilities"] = res.trajectory.success_probabilities;
            traj = std::move(res.trajectory);
            break;
        }
        }
    } catch (const StabilityGateError& e) {
        report["status"] = "gate-refused";
        report["message"] = e.what();
        write_json(out_dir / "report.json", report);
        out.exit_code = kExitGateRefusal;
        out.report = report;
        out.summary = std::string("refused: ") + e.what();
        return out;
    } catch (const NumericalError& e) {
        report["status"] = "numerical-failure";
        report["message"] = e.what();
        write_json(out_dir / "report.json", report);
        out.exit_code = kExitNumericalFailure;
        out.report = report;
        out.summary = std::string("numerical failure: ") + e.what();
        return out;
    }

    const double ratio = safe_ratio(spec.x0.norm(), traj.states.back().norm());
    if (run.method == SolveMethod::schrodingerize && std::isfinite(ratio) && ratio > 0.0) {
        report["complexity"] = to_json(complexity_estimate(aug, times.back(), run.eps_grid, ratio));
    }
    report["status"] = "ok";
    report["solver"] = traj.solver_id;
    report["provenance"] = traj.provenance;
    report["output_times"] = traj.times.size();
    {
        std::ofstream csv(out_dir / "trajectory.csv");
        if (!csv) {
            throw Error("cannot write " + (out_dir / "trajectory.csv").string());
        }
        write_csv(csv, traj);
    }
    write_json(out_dir / "report.json", report);
    out.report = report;
    out.summary = "solved with " + traj.solver_id + ": " + std::to_string(traj.size()) + " output times -> " +
                  (out_dir / "trajectory.csv").string();
    return out;
}

CommandOutput cmd_complexity(const ProblemSpec& spec, double eps, std::optional<double> norm_ratio,
                             const std::filesystem::path& out_dir)
{
    prepare(out_dir);
    const AugmentedSystem aug = augment(spec.system, spec.run.normalization);
    const double t = spec.run.t_end;
    double ratio = 1.0;
    if (norm_ratio) {
        ratio = *norm_ratio;
    } else {
        const Trajectory traj =
            solve_ode_direct(aug, initial_augmented(spec.x0, aug.layout), std::vector<double>{0.0, t > 0.0 ? t : 1.0});
        ratio = safe_ratio(spec.x0.norm(), traj.states.back().norm());
        if (!std::isfinite(ratio) || ratio <= 0.0) {
            throw NumericalError("norm ratio is undefined (zero initial or final state); pass --norm-ratio");
        }
    }
    const ComplexityReport c = complexity_estimate(aug, t, eps, ratio);
    json report{{"timestamp", utc_timestamp()},
                {"system", system_summary(spec, aug)},
                {"t", t},
                {"eps", eps},
                {"norm_ratio_source", norm_ratio ? "override" : "ode-oracle"},
                {"complexity", to_json(c)}};
    write_json(out_dir / "complexity.json", report);
    CommandOutput out;
    out.report = report;
    std::ostringstream os;
    os << std::setprecision(10) << "query complexity " << c.query_complexity << " (leading term " << c.leading_term
       << "), gate multiplier " << c.gate_multiplier;
    out.summary = os.str();
    return out;
}

CommandOutput cmd_model(const ProblemSpec& spec, ModelKind expected, const std::filesystem::path& out_dir)
{
    if (spec.kind != expected) {
        throw SpecError(std::vector<SpecIssue>{{"/model/type", expected == ModelKind::gme ? "expected a gme model" : "expected a redfield model"}});
    }
    prepare(out_dir);
    RunSettings run = spec.run;
    const json doc = system_document(spec.system, spec.x0, run);
    write_json(out_dir / "system.json", doc);
    CommandOutput out;
    out.report = doc;
    out.summary = "wrote " + (out_dir / "system.json").string() + " (N = " + std::to_string(spec.system.n()) + ", " +
                  std::to_string(spec.system.terms().size()) + " kernel terms)";
    return out;
}

}  // namespace ddeq
