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

#include <cstddef>
#include <span>
#include <vector>

#include "ddeq/lct.hpp"
#include "ddeq/trajectory.hpp"

namespace ddeq {

struct DdeOptions {
    /// Times to report; each is snapped to the nearest step. Empty means every step.
    std::vector<double> output_times;
    /// Upper bound on the retained history (all steps, all states).
    std::size_t max_history_bytes = std::size_t{1} << 30;
};

/// Direct integration of the distributed-delay system with its full history: the memory
/// convolutions use trapezoidal quadrature on the step grid and time stepping is Heun's
/// predictor-corrector, both second order.
Trajectory solve_dde_direct(const DelaySystem& sys, const ComplexVector& x0, double t_end, double h,
                            const DdeOptions& options = {});

/// Trapezoidal approximation of (S * u)(t_n) = int_0^{t_n} S(t_n - s) u(s) ds for every grid point
/// t_n = n h, given samples u(t_n).
std::vector<cplx> survival_convolution(const PhaseType& kernel, std::span<const cplx> samples, double h);

enum class OdeMethod {
    automatic,    ///< dense exponential up to `dense_limit` states, adaptive RK beyond
    expm,         ///< y(t) = exp(t C) y0 by scaling and squaring
    adaptive_rk,  ///< Dormand-Prince 5(4) with dense output
};

struct OdeOptions {
    OdeMethod method = OdeMethod::automatic;
    Index dense_limit = 512;
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
};

/// Solves dy/dt = C y at the requested (ascending, non-negative) times.
Trajectory solve_linear_ode(const SparseMatrix& C, const ComplexVector& y0, const std::vector<double>& times,
                            const OdeOptions& options = {});

/// Solves the augmented system; states hold the x-block, aux_states the full padded vector.
Trajectory solve_ode_direct(const AugmentedSystem& aug, const ComplexVector& ybar0, const std::vector<double>& times,
                            const OdeOptions& options = {});

}  // namespace ddeq
