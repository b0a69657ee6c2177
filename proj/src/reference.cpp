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

#include "ddeq/reference.hpp"

#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "ddeq/errors.hpp"

namespace ddeq {

namespace {

/// S(k h) for k = 0..steps, by repeated application of exp(h G) to the ones vector.
std::vector<double> sampled_survival(const PhaseType& kernel, double h, std::size_t steps)
{
    const RealMatrix step = (h * kernel.G).exp();
    RealVector w = RealVector::Ones(kernel.dim());
    std::vector<double> s(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        s[k] = kernel.alpha.dot(w);
        w = step * w;
    }
    return s;
}

void check_times(const std::vector<double>& times)
{
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0) || !std::isfinite(times[k])) {
            throw DomainError("output times must be finite and non-negative");
        }
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw DomainError("output times must be strictly ascending");
        }
    }
}

struct ConvolutionGroup {
    Index col = 0;
    std::vector<double> survival;
};

}  // namespace

Trajectory solve_dde_direct(const DelaySystem& sys, const ComplexVector& x0, double t_end, double h,
                            const DdeOptions& options)
{
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw DomainError("DDE step must be positive");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw DomainError("DDE end time must be finite and non-negative");
    }
    const Index n = sys.n();
    if (x0.size() != n) {
        throw DimensionError("initial state does not match the system dimension");
    }
    const auto steps = static_cast<std::size_t>(std::llround(t_end / h));
    const std::size_t history_bytes = (steps + 1) * static_cast<std::size_t>(n) * sizeof(cplx);
    if (history_bytes > options.max_history_bytes) {
        std::ostringstream os;
        os << "DDE history would need " << history_bytes << " bytes (cap " << options.max_history_bytes
           << "); increase the step or the cap";
        throw DomainError(os.str());
    }

    // Terms sharing a kernel and a source column share one convolution.
    std::vector<ConvolutionGroup> groups;
    std::vector<std::size_t> group_of(sys.terms().size());
    std::vector<const PhaseType*> group_kernel;
    for (std::size_t t = 0; t < sys.terms().size(); ++t) {
        const KernelTerm& term = sys.terms()[t];
        std::size_t g = 0;
        for (; g < groups.size(); ++g) {
            const PhaseType& other = *group_kernel[g];
            if (groups[g].col == term.col && other.dim() == term.kernel.dim() && other.alpha == term.kernel.alpha &&
                other.G == term.kernel.G) {
                break;
            }
        }
        if (g == groups.size()) {
            groups.push_back({term.col, sampled_survival(term.kernel, h, steps + 1)});
            group_kernel.push_back(&term.kernel);
        }
        group_of[t] = g;
    }

    std::vector<std::vector<cplx>> history(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        history[static_cast<std::size_t>(i)].reserve(steps + 1);
        history[static_cast<std::size_t>(i)].push_back(x0(i));
    }

    const SparseMatrix& A = sys.A();
    auto rhs = [&](const ComplexVector& x, const std::vector<cplx>& conv) {
        ComplexVector f = A * x;
        for (std::size_t t = 0; t < sys.terms().size(); ++t) {
            const KernelTerm& term = sys.terms()[t];
            f(term.row) += term.weight * conv[group_of[t]];
        }
        return f;
    };

    std::vector<std::size_t> wanted;
    if (options.output_times.empty()) {
        for (std::size_t k = 0; k <= steps; ++k) {
            wanted.push_back(k);
        }
    } else {
        check_times(options.output_times);
        for (const double t : options.output_times) {
            const auto k = static_cast<std::size_t>(std::llround(t / h));
            if (k > steps) {
                throw DomainError("requested output time lies beyond t_end");
            }
            if (!wanted.empty() && k <= wanted.back()) {
                throw DomainError("output times collapse onto the same step; refine the step");
            }
            wanted.push_back(k);
        }
    }

    Trajectory out;
    out.solver_id = "dde-direct";
    out.provenance["step"] = std::to_string(h);
    out.provenance["quadrature"] = "trapezoid";
    out.provenance["stepper"] = "heun";
    std::size_t next_output = 0;
    auto record = [&](std::size_t k, const ComplexVector& x) {
        if (next_output < wanted.size() && wanted[next_output] == k) {
            out.times.push_back(static_cast<double>(k) * h);
            out.states.push_back(x);
            ++next_output;
        }
    };

    ComplexVector x = x0;
    std::vector<cplx> conv(groups.size(), cplx(0.0, 0.0));
    std::vector<cplx> partial(groups.size());
    record(0, x);
    for (std::size_t k = 0; k < steps; ++k) {
        const ComplexVector f_now = rhs(x, conv);
        const ComplexVector predicted = x + h * f_now;

        // Everything in the trapezoid sum for t_{k+1} except the not-yet-known endpoint.
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const auto& s = groups[g].survival;
            const auto& hist = history[static_cast<std::size_t>(groups[g].col)];
            cplx sum = 0.5 * s[k + 1] * hist[0];
            for (std::size_t m = 1; m <= k; ++m) {
                sum += s[k + 1 - m] * hist[m];
            }
            partial[g] = sum;
        }

        std::vector<cplx> conv_next(groups.size());
        for (std::size_t g = 0; g < groups.size(); ++g) {
            conv_next[g] = h * (partial[g] + 0.5 * groups[g].survival[0] * predicted(groups[g].col));
        }
        const ComplexVector f_pred = rhs(predicted, conv_next);
        x += 0.5 * h * (f_now + f_pred);

        for (Index i = 0; i < n; ++i) {
            history[static_cast<std::size_t>(i)].push_back(x(i));
        }
        for (std::size_t g = 0; g < groups.size(); ++g) {
            conv[g] = h * (partial[g] + 0.5 * groups[g].survival[0] * x(groups[g].col));
        }
        record(k + 1, x);
    }
    return out;
}

std::vector<cplx> survival_convolution(const PhaseType& kernel, std::span<const cplx> samples, double h)
{
    if (samples.empty()) {
        return {};
    }
    const std::size_t steps = samples.size() - 1;
    const auto s = sampled_survival(kernel, h, steps);
    std::vector<cplx> out(samples.size(), cplx(0.0, 0.0));
    for (std::size_t k = 1; k <= steps; ++k) {
        cplx sum = 0.5 * (s[k] * samples[0] + s[0] * samples[k]);
        for (std::size_t m = 1; m < k; ++m) {
            sum += s[k - m] * samples[m];
        }
        out[k] = h * sum;
    }
    return out;
}

Trajectory solve_linear_ode(const SparseMatrix& C, const ComplexVector& y0, const std::vector<double>& times,
                            const OdeOptions& options)
{
    if (C.rows() != C.cols() || C.rows() != y0.size()) {
        throw DimensionError("ODE operator and initial state disagree in dimension");
    }
    check_times(times);

    OdeMethod method = options.method;
    if (method == OdeMethod::automatic) {
        method = C.rows() <= options.dense_limit ? OdeMethod::expm : OdeMethod::adaptive_rk;
    }

    Trajectory out;
    out.times = times;
    if (method == OdeMethod::expm) {
        out.solver_id = "ode-expm";
        const ComplexMatrix dense(C);
        for (const double t : times) {
            const ComplexMatrix prop = (t * dense).exp();
            out.states.push_back(prop * y0);
        }
        return out;
    }

    out.solver_id = "ode-dopri5";
    using State = std::vector<cplx>;
    namespace odeint = boost::numeric::odeint;
    State state(y0.data(), y0.data() + y0.size());
    auto system = [&C](const State& y, State& dydt, double) {
        const Eigen::Map<const ComplexVector> in(y.data(), static_cast<Index>(y.size()));
        Eigen::Map<ComplexVector> out_vec(dydt.data(), static_cast<Index>(dydt.size()));
        out_vec.noalias() = C * in;
    };
    auto observer = [&out](const State& y, double) {
        out.states.emplace_back(Eigen::Map<const ComplexVector>(y.data(), static_cast<Index>(y.size())));
    };
    if (times.empty()) {
        return out;
    }
    if (times.size() == 1) {
        if (times.front() == 0.0) {
            out.states.push_back(y0);
            return out;
        }
        std::vector<double> with_start{0.0, times.front()};
        odeint::integrate_times(
            odeint::make_dense_output(options.abs_tol, options.rel_tol, odeint::runge_kutta_dopri5<State>()),
            system, state, with_start.begin(), with_start.end(), 1e-3, observer);
        out.states.erase(out.states.begin());
        return out;
    }
    std::vector<double> grid = times;
    const bool prepend = grid.front() != 0.0;
    if (prepend) {
        grid.insert(grid.begin(), 0.0);
    }
    odeint::integrate_times(
        odeint::make_dense_output(options.abs_tol, options.rel_tol, odeint::runge_kutta_dopri5<State>()), system,
        state, grid.begin(), grid.end(), 1e-3, observer);
    if (prepend) {
        out.states.erase(out.states.begin());
    }
    return out;
}

Trajectory solve_ode_direct(const AugmentedSystem& aug, const ComplexVector& ybar0, const std::vector<double>& times,
                            const OdeOptions& options)
{
    if (ybar0.size() != aug.layout.dimension()) {
        throw DimensionError("padded initial state does not match the augmented dimension");
    }
    Trajectory full = solve_linear_ode(aug.Cbar, ybar0, times, options);
    Trajectory out;
    out.times = full.times;
    out.solver_id = "lct-ode/" + full.solver_id;
    out.aux_states = std::move(full.states);
    for (const auto& y : out.aux_states) {
        out.states.push_back(extract_x(y, aug.layout));
    }
    return out;
}

}  // namespace ddeq
