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

#include <optional>
#include <string>
#include <vector>

#include "ddeq/lct.hpp"
#include "ddeq/stability.hpp"
#include "ddeq/trajectory.hpp"

namespace ddeq {

/// Uniform periodic grid in the warped variable p and its Fourier modes.
struct SchrodGrid {
    double width = 0.0;  ///< l
    Index points = 0;    ///< N_p, a power of two

    /// p_k = k l / N_p - l / 2
    double p(Index k) const noexcept { return static_cast<double>(k) * width / static_cast<double>(points) - 0.5 * width; }
    /// mu_k = (2 pi / l) (k - N_p / 2)
    double mu(Index k) const noexcept;
    double dp() const noexcept { return width / static_cast<double>(points); }
};

/// Validated grid; throws DomainError unless width > 0 and points >= 2 is a power of two.
SchrodGrid make_grid(double width, Index points);

/// l = max(4, 2 (ln(1/eps) + h1_norm t)); when `points` is 0 the count is the smallest power of two
/// >= l sqrt(1/eps - 1) / pi (at least 16), so the mode cutoff resolves the e^{-|p|} profile to eps.
SchrodGrid choose_grid(double h1_norm, double t, double eps_grid, Index points = 0);
SchrodGrid choose_grid(const AugmentedSystem& aug, double t, double eps_grid, Index points = 0);

enum class Representation { mode_space, p_space };

struct SchrodState {
    SchrodGrid grid;
    ComplexMatrix amplitudes;  ///< n_sys x N_p
    Representation representation = Representation::mode_space;
    double norm0 = 0.0;

    double norm() const { return amplitudes.norm(); }
};

/// Forward DFT over p (kernel e^{-i mu p}, no scaling) and its inverse (1/N_p), applied row-wise.
ComplexMatrix to_modes(const ComplexMatrix& p_samples, const SchrodGrid& grid);
ComplexMatrix to_points(const ComplexMatrix& modes, const SchrodGrid& grid);

SchrodState to_p_space(const SchrodState& state);
SchrodState to_mode_space(const SchrodState& state);

/// v(0, p_k) = e^{-|p_k|} y0, returned in mode space.
SchrodState encode(const ComplexVector& y0, const SchrodGrid& grid);

struct HermitianSplit {
    SparseMatrix H1;  ///< (C + C^H) / 2
    SparseMatrix H2;  ///< i (C - C^H) / 2, so C = H1 - i H2
};

HermitianSplit hermitian_split(const SparseMatrix& C);

/// Per-mode propagators exp(-i (mu_k H1 + H2) t). Small systems use one Hermitian eigendecomposition
/// per mode (reused across times); large ones use a Lanczos approximation of the action.
class ModePropagator {
public:
    ModePropagator(const SparseMatrix& H1, const SparseMatrix& H2, const SchrodGrid& grid, Index dense_limit = 512);

    /// Propagates a mode-space state by t (from its current time).
    SchrodState apply(const SchrodState& state, double t) const;

    bool dense() const noexcept { return dense_; }

private:
    SparseMatrix H1_;
    SparseMatrix H2_;
    SchrodGrid grid_;
    bool dense_ = true;
    bool cached_ = false;
    std::vector<ComplexMatrix> vectors_;
    std::vector<RealVector> values_;
};

/// Throws DomainError if H1 or H2 is not Hermitian to 1e-12 (relative to its max norm) or shapes disagree.
SchrodState evolve(const SchrodState& state, const SparseMatrix& H1, const SparseMatrix& H2, double t);

/// exp(-i K t) v for Hermitian K, by restarted Lanczos with a-posteriori step control.
ComplexVector lanczos_expm_action(const SparseMatrix& K, const ComplexVector& v, double t, double tol = 1e-13,
                                  Index krylov_dim = 30);

enum class RecoveryMethod {
    pointwise,  ///< e^{p*} v(t, p*)
    integral,   ///< trapezoid over p >= 0 normalised by the same rule applied to e^{-p}
};

struct Recovery {
    ComplexVector y;
    double success_probability = 0.0;  ///< share of the squared norm on p > 0
    double boundary_mass = 0.0;        ///< share of the squared norm in the two outermost cells
    double p_star = 0.0;
};

/// `p_star` defaults to the smallest grid point >= 1; an explicit value must be a positive grid point
/// below l/2.
Recovery recover(const SchrodState& state, RecoveryMethod method = RecoveryMethod::pointwise,
                 std::optional<double> p_star = std::nullopt);

struct SchrodParams {
    double eps_grid = 1e-4;
    Index points = 0;  ///< 0 chooses automatically
    bool allow_shift = false;
    double shift_margin = 0.0;
    RecoveryMethod recovery = RecoveryMethod::pointwise;
    std::optional<double> p_star;
    Normalization normalization = Normalization::automatic;
    bool boundary_check = true;
    StabilityTolerances tolerances;
    Index dense_limit = 512;
};

struct SchrodRun {
    Trajectory trajectory;
    SchrodGrid grid;
    StabilityReport stability;
    double shift = 0.0;
    double unitarity_drift = 0.0;  ///< max relative change of the mode-space norm
    double boundary_mass = 0.0;    ///< max over output times
};

/// Gate, encode, evolve, recover for every output time. Throws StabilityGateError when the
/// augmented matrix is not semi-stable, or when its Hermitian part is indefinite and shifting
/// is not allowed. Throws NumericalError with a suggested grid size when the boundary check fails.
SchrodRun solve_schrodingerized(const AugmentedSystem& aug, const ComplexVector& ybar0,
                                const std::vector<double>& times, const SchrodParams& params = {});
SchrodRun solve_schrodingerized(const DelaySystem& sys, const ComplexVector& x0, const std::vector<double>& times,
                                const SchrodParams& params = {});

struct ComplexityInputs {
    Index n = 0;
    Index g = 0;
    Index markov_sparsity = 0;  ///< s_A
    Index memory_sparsity = 0;  ///< s_B
    double t = 0.0;
    double eps = 0.01;
    double cbar_max_norm = 0.0;
    double norm_ratio = 1.0;  ///< ||x(0)|| / ||x(t)||
    Index gate_base = 32;     ///< m
    Index hamiltonian_sparsity = 0;
    double h1_max_norm = 0.0;
    double h2_max_norm = 0.0;
};

struct ComplexityReport {
    Index sparsity_s = 0;  ///< s_A + g s_B
    double max_norm = 0.0;
    double leading_term = 0.0;  ///< (1/eps) s t ||C||_max
    double log_term = 0.0;      ///< log(1/eps) / log log(1/eps)
    double query_complexity = 0.0;
    double gate_multiplier = 0.0;
    double norm_ratio = 1.0;
    double success_probability = 1.0;  ///< (||x(t)|| / ||x(0)||)^2
    double hamiltonian_query = 0.0;
    std::vector<std::string> warnings;
};

/// Unit constants throughout. The log term uses max(e, ln(1/eps)) inside the outer logarithm so it
/// stays finite and tends to 0 as eps -> 1.
ComplexityReport complexity_estimate(const ComplexityInputs& in);
ComplexityReport complexity_estimate(const AugmentedSystem& aug, double t, double eps, double norm_ratio,
                                     Index gate_base = 32);

}  // namespace ddeq
