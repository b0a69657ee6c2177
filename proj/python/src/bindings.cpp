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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ddeq/cli.hpp"
#include "ddeq/errors.hpp"
#include "ddeq/lct.hpp"
#include "ddeq/models.hpp"
#include "ddeq/phasetype.hpp"
#include "ddeq/problem_spec.hpp"
#include "ddeq/reference.hpp"
#include "ddeq/schrodingerizer.hpp"
#include "ddeq/stability.hpp"

namespace py = pybind11;
using namespace ddeq;

namespace {

SparseMatrix to_sparse(const ComplexMatrix& m)
{
    SparseMatrix s = m.sparseView();
    s.makeCompressed();
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Distributed-delay linear systems: chain-trick augmentation, stability and solvers";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<SpecError>(m, "SpecError", validation.ptr());
    py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
    py::register_exception<ConditioningError>(m, "ConditioningError", base.ptr());
    py::register_exception<StabilityGateError>(m, "StabilityGateError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    py::class_<PhaseType>(m, "PhaseType")
        .def(py::init([](RealVector alpha, RealMatrix G) {
                 PhaseType ph{std::move(alpha), std::move(G)};
                 require_valid(ph);
                 return ph;
             }),
             py::arg("alpha"), py::arg("G"))
        .def_readonly("alpha", &PhaseType::alpha)
        .def_readonly("G", &PhaseType::G)
        .def_property_readonly("dim", [](const PhaseType& ph) { return ph.alpha.size(); })
        .def("density", [](const PhaseType& ph, double t) { return evaluate(ph, t).density; })
        .def("survival", [](const PhaseType& ph, double t) { return evaluate(ph, t).survival; })
        .def("cdf", [](const PhaseType& ph, double t) { return evaluate(ph, t).cdf; })
        .def("mean", [](const PhaseType& ph) { return mean(ph); })
        .def("laplace_survival", [](const PhaseType& ph, cplx s) { return laplace_survival(ph, s); });

    m.def("exponential", &exponential, py::arg("rate"));
    m.def("erlang", &erlang, py::arg("rate"), py::arg("k"));
    m.def("hypoexponential", [](const std::vector<double>& rates) { return hypoexponential(rates); },
          py::arg("rates"));
    m.def("coxian",
          [](const std::vector<double>& rates, const std::vector<double>& continuation) {
              return coxian(rates, continuation);
          },
          py::arg("rates"), py::arg("continuation"));

    py::class_<KernelTerm>(m, "KernelTerm")
        .def(py::init([](Index row, Index col, cplx weight, PhaseType kernel) {
                 return KernelTerm{row, col, weight, std::move(kernel)};
             }),
             py::arg("row"), py::arg("col"), py::arg("weight"), py::arg("kernel"))
        .def_readonly("row", &KernelTerm::row)
        .def_readonly("col", &KernelTerm::col)
        .def_readonly("weight", &KernelTerm::weight)
        .def_readonly("kernel", &KernelTerm::kernel);

    py::class_<DelaySystem>(m, "DelaySystem")
        .def(py::init([](const ComplexMatrix& A, std::vector<KernelTerm> terms) {
                 if (A.rows() != A.cols()) {
                     throw DimensionError("A must be square");
                 }
                 return DelaySystem(A.rows(), to_sparse(A), std::move(terms));
             }),
             py::arg("A"), py::arg("terms") = std::vector<KernelTerm>{})
        .def_property_readonly("n", &DelaySystem::n)
        .def_property_readonly("A", [](const DelaySystem& s) { return ComplexMatrix(s.A()); })
        .def_property_readonly("terms", &DelaySystem::terms)
        .def_property_readonly("markov_sparsity", &DelaySystem::markov_sparsity)
        .def_property_readonly("memory_sparsity", &DelaySystem::memory_sparsity)
        .def_property_readonly("max_kernel_dim", &DelaySystem::max_kernel_dim)
        .def("characteristic", [](const DelaySystem& s, cplx lambda) { return dde_characteristic(s, lambda); });

    py::enum_<Normalization>(m, "Normalization")
        .value("automatic", Normalization::automatic)
        .value("strict", Normalization::strict);

    py::class_<Layout>(m, "Layout")
        .def_readonly("n", &Layout::n)
        .def_readonly("g", &Layout::g)
        .def_readonly("s", &Layout::s)
        .def_property_readonly("dimension", &Layout::dimension)
        .def("index_of", &Layout::index_of, py::arg("row"), py::arg("slot"), py::arg("component"));

    py::class_<AugmentedSystem>(m, "AugmentedSystem")
        .def_readonly("Cbar", &AugmentedSystem::Cbar)
        .def_property_readonly("dense", [](const AugmentedSystem& a) { return ComplexMatrix(a.Cbar); })
        .def_readonly("layout", &AugmentedSystem::layout)
        .def_property_readonly("max_norm", [](const AugmentedSystem& a) { return max_norm(a.Cbar); })
        .def_property_readonly("row_nonzeros", [](const AugmentedSystem& a) { return row_nonzeros(a.Cbar); });

    m.def("augment", &augment, py::arg("system"), py::arg("normalization") = Normalization::automatic);
    m.def("initial_augmented", &initial_augmented, py::arg("x0"), py::arg("layout"));
    m.def("extract_x", &extract_x, py::arg("ybar"), py::arg("layout"));

    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("eigenvalues", &StabilityReport::eigenvalues)
        .def_readonly("max_real_part", &StabilityReport::max_real_part)
        .def_readonly("semi_stable", &StabilityReport::semi_stable)
        .def_readonly("h1_max_eig", &StabilityReport::h1_max_eig)
        .def_readonly("shift_applied", &StabilityReport::shift_applied);
    py::class_<RootProbeReport>(m, "RootProbeReport")
        .def_readonly("radius", &RootProbeReport::radius)
        .def_readonly("right_half_plane_roots", &RootProbeReport::right_half_plane_roots)
        .def_readonly("semi_stable", &RootProbeReport::semi_stable);

    m.def("semistability", [](const ComplexMatrix& C) { return semistability_of_matrix(C); }, py::arg("C"));
    m.def("probe_roots", [](const DelaySystem& s) { return probe_characteristic_roots(s); }, py::arg("system"));

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("states", &Trajectory::states)
        .def_readonly("solver_id", &Trajectory::solver_id)
        .def_readonly("success_probabilities", &Trajectory::success_probabilities)
        .def("__len__", &Trajectory::size);
    m.def("max_abs_difference", &max_abs_difference);

    m.def("solve_dde_direct",
          [](const DelaySystem& s, const ComplexVector& x0, double t_end, double h, std::vector<double> times) {
              DdeOptions o;
              o.output_times = std::move(times);
              py::gil_scoped_release release;
              return solve_dde_direct(s, x0, t_end, h, o);
          },
          py::arg("system"), py::arg("x0"), py::arg("t_end"), py::arg("h"),
          py::arg("times") = std::vector<double>{});
    m.def("solve_lct_ode",
          [](const DelaySystem& s, const ComplexVector& x0, const std::vector<double>& times) {
              py::gil_scoped_release release;
              const auto aug = augment(s);
              return solve_ode_direct(aug, initial_augmented(x0, aug.layout), times);
          },
          py::arg("system"), py::arg("x0"), py::arg("times"));

    py::enum_<RecoveryMethod>(m, "Recovery")
        .value("pointwise", RecoveryMethod::pointwise)
        .value("integral", RecoveryMethod::integral);

    py::class_<SchrodGrid>(m, "SchrodGrid")
        .def_readonly("width", &SchrodGrid::width)
        .def_readonly("points", &SchrodGrid::points)
        .def("p", &SchrodGrid::p)
        .def("mu", &SchrodGrid::mu);
    m.def("choose_grid", py::overload_cast<double, double, double, Index>(&choose_grid), py::arg("h1_norm"),
          py::arg("t"), py::arg("eps_grid"), py::arg("points") = 0);

    py::class_<SchrodRun>(m, "SchrodRun")
        .def_readonly("trajectory", &SchrodRun::trajectory)
        .def_readonly("grid", &SchrodRun::grid)
        .def_readonly("stability", &SchrodRun::stability)
        .def_readonly("shift", &SchrodRun::shift)
        .def_readonly("unitarity_drift", &SchrodRun::unitarity_drift)
        .def_readonly("boundary_mass", &SchrodRun::boundary_mass);

    m.def("solve_schrodingerized",
          [](const DelaySystem& s, const ComplexVector& x0, const std::vector<double>& times, Index points,
             double eps_grid, bool allow_shift, RecoveryMethod recovery) {
              SchrodParams p;
              p.points = points;
              p.eps_grid = eps_grid;
              p.allow_shift = allow_shift;
              p.recovery = recovery;
              py::gil_scoped_release release;
              return solve_schrodingerized(s, x0, times, p);
          },
          py::arg("system"), py::arg("x0"), py::arg("times"), py::arg("points") = 0, py::arg("eps_grid") = 1e-4,
          py::arg("allow_shift") = false, py::arg("recovery") = RecoveryMethod::pointwise);

    py::class_<ComplexityReport>(m, "ComplexityReport")
        .def_readonly("sparsity_s", &ComplexityReport::sparsity_s)
        .def_readonly("max_norm", &ComplexityReport::max_norm)
        .def_readonly("leading_term", &ComplexityReport::leading_term)
        .def_readonly("log_term", &ComplexityReport::log_term)
        .def_readonly("query_complexity", &ComplexityReport::query_complexity)
        .def_readonly("gate_multiplier", &ComplexityReport::gate_multiplier)
        .def_readonly("success_probability", &ComplexityReport::success_probability)
        .def_readonly("warnings", &ComplexityReport::warnings);
    m.def("complexity",
          [](const DelaySystem& s, double t, double eps, double norm_ratio, Index gate_base) {
              return complexity_estimate(augment(s), t, eps, norm_ratio, gate_base);
          },
          py::arg("system"), py::arg("t"), py::arg("eps") = 0.01, py::arg("norm_ratio") = 1.0,
          py::arg("gate_base") = 32);

    m.def("build_gme",
          [](const RealMatrix& rates, const std::map<std::pair<Index, Index>, PhaseType>& kernels) {
              return build_gme(GmeSpec{rates.rows(), rates, kernels});
          },
          py::arg("rates"), py::arg("kernels"));

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_readonly("system", &ProblemSpec::system)
        .def_readonly("x0", &ProblemSpec::x0);
    m.def("load_spec", &load_spec, py::arg("path"));
    m.def("parse_spec", &parse_spec, py::arg("text"));
    m.def("run_command",
          [](const std::string& command, const ProblemSpec& spec, const std::filesystem::path& out_dir) {
              CommandOutput out;
              if (command == "validate") {
                  out = cmd_validate(spec);
              } else if (command == "augment") {
                  out = cmd_augment(spec, out_dir);
              } else if (command == "stability") {
                  out = cmd_stability(spec, out_dir);
              } else if (command == "solve") {
                  out = cmd_solve(spec, out_dir);
              } else {
                  throw DomainError("unknown command: " + command);
              }
              return py::make_tuple(out.exit_code, out.report.dump());
          },
          py::arg("command"), py::arg("spec"), py::arg("out_dir"));
}
