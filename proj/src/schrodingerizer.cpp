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

#include "ddeq/schrodingerizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "ddeq/errors.hpp"

namespace ddeq {

namespace {

bool is_power_of_two(Index n)
{
    return n >= 1 && (n & (n - 1)) == 0;
}

Index next_power_of_two(double x)
{
    Index n = 1;
    while (static_cast<double>(n) < x && n < (Index{1} << 40)) {
        n <<= 1;
    }
    return n;
}

constexpr Index kMaxAutoPoints = Index{1} << 17;

double sign_of(Index k)
{
    return (k % 2 == 0) ? 1.0 : -1.0;
}

double max_abs_row_sum(const SparseMatrix& m)
{
    double best = 0.0;
    for (Index r = 0; r < m.outerSize(); ++r) {
        double sum = 0.0;
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            sum += std::abs(it.value());
        }
        best = std::max(best, sum);
    }
    return best;
}

void require_hermitian(const SparseMatrix& H, const char* name)
{
    const SparseMatrix diff = H - SparseMatrix(H.adjoint());
    const double scale = std::max(1.0, max_norm(H));
    if (max_norm(diff) > 1e-12 * scale) {
        throw DomainError(std::string(name) + " is not Hermitian");
    }
}

double spectral_norm_hermitian(const SparseMatrix& H, Index dense_limit)
{
    if (H.rows() == 0) {
        return 0.0;
    }
    if (H.rows() <= dense_limit) {
        const ComplexMatrix dense(H);
        const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(dense, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().cwiseAbs().maxCoeff();
    }
    // ||H||_2 <= ||H||_inf for Hermitian H; conservative is fine for sizing l.
    return max_abs_row_sum(H);
}

void check_output_times(const std::vector<double>& times)
{
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || times[k] < 0.0) {
            throw DomainError("output times must be finite and non-negative");
        }
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw DomainError("output times must be strictly ascending");
        }
    }
}

}  // namespace

double SchrodGrid::mu(Index k) const noexcept
{
    return 2.0 * std::numbers::pi / width * static_cast<double>(k - points / 2);
}

SchrodGrid make_grid(double width, Index points)
{
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw DomainError("grid width must be positive");
    }
    if (points < 2 || !is_power_of_two(points)) {
        throw DomainError("number of grid points must be a power of two >= 2");
    }
    return SchrodGrid{width, points};
}

SchrodGrid choose_grid(double h1_norm, double t, double eps_grid, Index points)
{
    if (!(eps_grid > 0.0 && eps_grid < 1.0)) {
        throw DomainError("eps_grid must lie in (0, 1)");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("time must be finite and non-negative");
    }
    if (!(h1_norm >= 0.0) || !std::isfinite(h1_norm)) {
        throw DomainError("||H1|| must be finite and non-negative");
    }
    const double width = std::max(4.0, 2.0 * (std::log(1.0 / eps_grid) + h1_norm * t));
    if (points == 0) {
        const double needed = width * std::sqrt(1.0 / eps_grid - 1.0) / std::numbers::pi;
        points = std::min(kMaxAutoPoints, std::max(Index{16}, next_power_of_two(needed)));
    }
    return make_grid(width, points);
}

SchrodGrid choose_grid(const AugmentedSystem& aug, double t, double eps_grid, Index points)
{
    const HermitianSplit split = hermitian_split(aug.Cbar);
    return choose_grid(spectral_norm_hermitian(split.H1, 512), t, eps_grid, points);
}

// With j' = j - N/2 and k' = k - N/2, mu_j p_k = 2 pi j' k' / N, so the transform is a standard FFT
// with (-1)^k modulation on input and (-1)^(j + N/2) on output.
ComplexMatrix to_modes(const ComplexMatrix& p_samples, const SchrodGrid& grid)
{
    const Index N = grid.points;
    if (p_samples.cols() != N) {
        throw DimensionError("sample count does not match the grid");
    }
    ComplexMatrix out(p_samples.rows(), N);
    Eigen::FFT<double> fft;
    std::vector<cplx> in(static_cast<std::size_t>(N));
    std::vector<cplx> res;
    for (Index r = 0; r < p_samples.rows(); ++r) {
        for (Index k = 0; k < N; ++k) {
            in[static_cast<std::size_t>(k)] = sign_of(k) * p_samples(r, k);
        }
        fft.fwd(res, in);
        for (Index j = 0; j < N; ++j) {
            out(r, j) = sign_of(j + N / 2) * res[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

ComplexMatrix to_points(const ComplexMatrix& modes, const SchrodGrid& grid)
{
    const Index N = grid.points;
    if (modes.cols() != N) {
        throw DimensionError("mode count does not match the grid");
    }
    ComplexMatrix out(modes.rows(), N);
    Eigen::FFT<double> fft;  // inverse includes the 1/N factor
    std::vector<cplx> in(static_cast<std::size_t>(N));
    std::vector<cplx> res;
    for (Index r = 0; r < modes.rows(); ++r) {
        for (Index j = 0; j < N; ++j) {
            in[static_cast<std::size_t>(j)] = sign_of(j) * modes(r, j);
        }
        fft.inv(res, in);
        for (Index k = 0; k < N; ++k) {
            out(r, k) = sign_of(k + N / 2) * res[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

SchrodState to_p_space(const SchrodState& state)
{
    if (state.representation == Representation::p_space) {
        return state;
    }
    SchrodState out = state;
    out.amplitudes = to_points(state.amplitudes, state.grid);
    out.representation = Representation::p_space;
    return out;
}

SchrodState to_mode_space(const SchrodState& state)
{
    if (state.representation == Representation::mode_space) {
        return state;
    }
    SchrodState out = state;
    out.amplitudes = to_modes(state.amplitudes, state.grid);
    out.representation = Representation::mode_space;
    return out;
}

SchrodState encode(const ComplexVector& y0, const SchrodGrid& grid)
{
    if (!y0.allFinite()) {
        throw DomainError("initial state must be finite");
    }
    ComplexMatrix profile(1, grid.points);
    for (Index k = 0; k < grid.points; ++k) {
        profile(0, k) = std::exp(-std::abs(grid.p(k)));
    }
    const ComplexMatrix w = to_modes(profile, grid);
    SchrodState state;
    state.grid = grid;
    state.amplitudes = y0 * w;
    state.representation = Representation::mode_space;
    state.norm0 = state.amplitudes.norm();
    return state;
}

HermitianSplit hermitian_split(const SparseMatrix& C)
{
    if (C.rows() != C.cols()) {
        throw DimensionError("Hermitian split needs a square matrix");
    }
    const SparseMatrix Ch = C.adjoint();
    HermitianSplit split;
    split.H1 = 0.5 * (C + Ch);
    split.H2 = cplx(0.0, 0.5) * (C - Ch);
    split.H1.prune(cplx(0.0, 0.0));
    split.H2.prune(cplx(0.0, 0.0));
    return split;
}

ComplexVector lanczos_expm_action(const SparseMatrix& K, const ComplexVector& v, double t, double tol,
                                  Index krylov_dim)
{
    const double beta0 = v.norm();
    if (beta0 == 0.0 || t == 0.0) {
        return v;
    }
    const double knorm = std::max(max_abs_row_sum(K), 1e-300);
    const Index n = v.size();
    const Index m = std::max<Index>(2, std::min(krylov_dim, n));

    ComplexVector w = v;
    double remaining = std::abs(t);
    const double direction = t > 0.0 ? 1.0 : -1.0;
    double tau = std::min(remaining, 0.5 * static_cast<double>(m) / knorm);

    ComplexMatrix V(n, m + 1);
    RealVector alpha(m);
    RealVector beta(m);
    while (remaining > 0.0) {
        const double bw = w.norm();
        V.col(0) = w / bw;
        Index used = m;
        bool breakdown = false;
        for (Index j = 0; j < m; ++j) {
            ComplexVector q = K * V.col(j);
            alpha(j) = std::real(V.col(j).dot(q));
            // Full reorthogonalisation, twice.
            for (int pass = 0; pass < 2; ++pass) {
                for (Index i = 0; i <= j; ++i) {
                    q -= V.col(i).dot(q) * V.col(i);
                }
            }
            beta(j) = q.norm();
            if (beta(j) <= 1e-14 * knorm) {
                used = j + 1;
                breakdown = true;
                break;
            }
            V.col(j + 1) = q / beta(j);
        }
        RealMatrix T = RealMatrix::Zero(used, used);
        for (Index j = 0; j < used; ++j) {
            T(j, j) = alpha(j);
            if (j + 1 < used) {
                T(j, j + 1) = beta(j);
                T(j + 1, j) = beta(j);
            }
        }
        const Eigen::SelfAdjointEigenSolver<RealMatrix> eig(T);
        const RealMatrix& Q = eig.eigenvectors();
        const RealVector& theta = eig.eigenvalues();
        tau = std::min(tau, remaining);
        ComplexVector u;
        while (true) {
            ComplexVector phase(used);
            for (Index k = 0; k < used; ++k) {
                phase(k) = std::exp(cplx(0.0, -direction * theta(k) * tau)) * Q(0, k);
            }
            u = Q.cast<cplx>() * phase;
            const double err = breakdown ? 0.0 : beta(used - 1) * std::abs(u(used - 1));
            if (err <= tol || tau < 1e-12 * std::abs(t)) {
                break;
            }
            tau *= 0.5;
        }
        w = bw * (V.leftCols(used) * u);
        remaining -= tau;
        if (remaining < 1e-15 * std::abs(t)) {
            remaining = 0.0;
        }
        tau *= 1.5;
    }
    return w;
}

ModePropagator::ModePropagator(const SparseMatrix& H1, const SparseMatrix& H2, const SchrodGrid& grid,
                               Index dense_limit)
    : H1_(H1), H2_(H2), grid_(grid), dense_(H1.rows() <= dense_limit)
{
    if (H1.rows() != H1.cols() || H2.rows() != H2.cols() || H1.rows() != H2.rows()) {
        throw DimensionError("H1 and H2 must be square and of equal size");
    }
    require_hermitian(H1_, "H1");
    require_hermitian(H2_, "H2");
    const Index n = H1.rows();
    // Cache eigendecompositions when they fit in roughly 256 MiB.
    cached_ = dense_ && static_cast<double>(grid.points) * static_cast<double>(n * n) <= double(1 << 24);
    if (!cached_) {
        return;
    }
    vectors_.resize(static_cast<std::size_t>(grid.points));
    values_.resize(static_cast<std::size_t>(grid.points));
    const ComplexMatrix h1(H1_);
    const ComplexMatrix h2(H2_);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (Index k = 0; k < grid.points; ++k) {
        const ComplexMatrix K = grid.mu(k) * h1 + h2;
        const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(K);
        vectors_[static_cast<std::size_t>(k)] = eig.eigenvectors();
        values_[static_cast<std::size_t>(k)] = eig.eigenvalues();
    }
}

SchrodState ModePropagator::apply(const SchrodState& state, double t) const
{
    if (state.representation != Representation::mode_space) {
        throw DomainError("propagation needs a mode-space state");
    }
    if (state.amplitudes.rows() != H1_.rows() || state.grid.points != grid_.points ||
        state.grid.width != grid_.width) {
        throw DimensionError("state does not match the propagator");
    }
    SchrodState out = state;
    if (t == 0.0) {
        return out;
    }
    const ComplexMatrix h1 = dense_ && !cached_ ? ComplexMatrix(H1_) : ComplexMatrix();
    const ComplexMatrix h2 = dense_ && !cached_ ? ComplexMatrix(H2_) : ComplexMatrix();
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (Index k = 0; k < grid_.points; ++k) {
        const ComplexVector v = state.amplitudes.col(k);
        if (cached_) {
            const auto& Vk = vectors_[static_cast<std::size_t>(k)];
            const auto& lk = values_[static_cast<std::size_t>(k)];
            ComplexVector c = Vk.adjoint() * v;
            for (Index i = 0; i < c.size(); ++i) {
                c(i) *= std::exp(cplx(0.0, -lk(i) * t));
            }
            out.amplitudes.col(k) = Vk * c;
        } else if (dense_) {
            const ComplexMatrix K = grid_.mu(k) * h1 + h2;
            const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(K);
            ComplexVector c = eig.eigenvectors().adjoint() * v;
            for (Index i = 0; i < c.size(); ++i) {
                c(i) *= std::exp(cplx(0.0, -eig.eigenvalues()(i) * t));
            }
            out.amplitudes.col(k) = eig.eigenvectors() * c;
        } else {
            const SparseMatrix K = grid_.mu(k) * H1_ + H2_;
            out.amplitudes.col(k) = lanczos_expm_action(K, v, t);
        }
    }
    return out;
}

SchrodState evolve(const SchrodState& state, const SparseMatrix& H1, const SparseMatrix& H2, double t)
{
    const ModePropagator prop(H1, H2, state.grid);
    return prop.apply(to_mode_space(state), t);
}

Recovery recover(const SchrodState& state, RecoveryMethod method, std::optional<double> p_star)
{
    const SchrodGrid& grid = state.grid;
    const SchrodState ps = to_p_space(state);
    const ComplexMatrix& v = ps.amplitudes;
    const Index N = grid.points;
    const double dp = grid.dp();

    Recovery rec;
    const RealVector mass = v.colwise().squaredNorm().transpose();
    double total = 0.0;
    double positive = 0.0;
    for (Index k = 0; k < N; ++k) {
        total += mass(k);
        if (grid.p(k) > 0.0) {
            positive += mass(k);
        }
    }
    rec.success_probability = total > 0.0 ? positive / total : 0.0;
    rec.boundary_mass = total > 0.0 ? (mass(0) + mass(N - 1)) / total : 0.0;

    if (method == RecoveryMethod::pointwise) {
        Index k_star = -1;
        if (p_star) {
            const double target = *p_star;
            if (!(target > 0.0) || !(target < 0.5 * grid.width)) {
                throw DomainError("p* must lie in (0, l/2)");
            }
            const double pos = (target + 0.5 * grid.width) / dp;
            const double nearest = std::round(pos);
            if (std::abs(pos - nearest) > 1e-9 * std::max(1.0, pos)) {
                throw DomainError("p* is not a grid point");
            }
            k_star = static_cast<Index>(nearest);
        } else {
            for (Index k = 0; k < N; ++k) {
                if (grid.p(k) >= 1.0 - 1e-12) {
                    k_star = k;
                    break;
                }
            }
            if (k_star < 0) {
                throw DomainError("grid has no point with p >= 1; widen the interval");
            }
        }
        rec.p_star = grid.p(k_star);
        rec.y = std::exp(rec.p_star) * v.col(k_star);
        return rec;
    }

    // Trapezoid on [0, l/2); the same rule on e^{-p} gives the normalisation.
    rec.y = ComplexVector::Zero(v.rows());
    double weight_sum = 0.0;
    for (Index k = N / 2; k < N; ++k) {
        const double w = (k == N / 2 ? 0.5 : 1.0) * dp;
        rec.y += w * v.col(k);
        weight_sum += w * std::exp(-grid.p(k));
    }
    rec.y /= weight_sum;
    return rec;
}

SchrodRun solve_schrodingerized(const AugmentedSystem& aug, const ComplexVector& ybar0,
                                const std::vector<double>& times, const SchrodParams& params)
{
    check_output_times(times);
    const Index n_sys = aug.Cbar.rows();
    if (ybar0.size() != n_sys) {
        throw DimensionError("padded initial state does not match the augmented dimension");
    }

    SchrodRun run;
    const ComplexMatrix dense(aug.Cbar);
    run.stability = semistability_of_matrix(dense, params.tolerances);
    if (!run.stability.semi_stable) {
        std::ostringstream os;
        os << "augmented matrix is not semi-stable (max Re eigenvalue " << run.stability.max_real_part
           << ", or a defective imaginary-axis eigenvalue)";
        throw StabilityGateError(os.str());
    }
    const HermitianPartCheck h1 = check_h1_negativity(dense, params.shift_margin, params.tolerances.max_real_part);
    if (h1.max_eig > params.tolerances.max_real_part && !params.allow_shift) {
        std::ostringstream os;
        os << "Hermitian part of the augmented matrix is indefinite (lambda_max = " << h1.max_eig
           << "); rerun with shifting allowed";
        throw StabilityGateError(os.str());
    }
    run.shift = params.allow_shift ? h1.shift : 0.0;
    run.stability.shift_applied = run.shift;

    SparseMatrix identity(n_sys, n_sys);
    identity.setIdentity();
    const SparseMatrix shifted = aug.Cbar - cplx(run.shift, 0.0) * identity;
    const HermitianSplit split = hermitian_split(shifted);
    const double t_max = times.empty() ? 0.0 : times.back();
    run.grid = choose_grid(spectral_norm_hermitian(split.H1, params.dense_limit), t_max, params.eps_grid,
                           params.points);

    const ModePropagator prop(split.H1, split.H2, run.grid, params.dense_limit);
    const SchrodState start = encode(ybar0, run.grid);

    Trajectory& traj = run.trajectory;
    traj.solver_id = "schrodingerized";
    traj.provenance["grid_width"] = std::to_string(run.grid.width);
    traj.provenance["grid_points"] = std::to_string(run.grid.points);
    traj.provenance["shift"] = std::to_string(run.shift);
    traj.provenance["recovery"] = params.recovery == RecoveryMethod::pointwise ? "pointwise" : "integral";
    for (const double t : times) {
        const SchrodState state = prop.apply(start, t);
        if (start.norm0 > 0.0) {
            run.unitarity_drift = std::max(run.unitarity_drift, std::abs(state.norm() - start.norm0) / start.norm0);
        }
        const Recovery rec = recover(state, params.recovery, params.p_star);
        run.boundary_mass = std::max(run.boundary_mass, rec.boundary_mass);
        if (params.boundary_check && rec.boundary_mass > params.eps_grid) {
            std::ostringstream os;
            os << "grid check failed at t = " << t << ": boundary mass " << rec.boundary_mass << " exceeds "
               << params.eps_grid << "; suggested N_p = " << 2 * run.grid.points
               << " (or a smaller eps_grid for a wider interval)";
            throw NumericalError(os.str());
        }
        const ComplexVector y = std::exp(run.shift * t) * rec.y;
        traj.times.push_back(t);
        traj.aux_states.push_back(y);
        traj.states.push_back(extract_x(y, aug.layout));
        traj.success_probabilities.push_back(rec.success_probability);
    }
    return run;
}

SchrodRun solve_schrodingerized(const DelaySystem& sys, const ComplexVector& x0, const std::vector<double>& times,
                                const SchrodParams& params)
{
    const AugmentedSystem aug = augment(sys, params.normalization);
    return solve_schrodingerized(aug, initial_augmented(x0, aug.layout), times, params);
}

ComplexityReport complexity_estimate(const ComplexityInputs& in)
{
    if (!(in.eps > 0.0 && in.eps < 1.0)) {
        throw DomainError("eps must lie in (0, 1)");
    }
    if (!(in.t >= 0.0) || !std::isfinite(in.t)) {
        throw DomainError("time must be finite and non-negative");
    }
    if (!(in.norm_ratio > 0.0) || !std::isfinite(in.norm_ratio)) {
        throw DomainError("norm ratio must be positive and finite");
    }
    if (in.n < 1 || in.g < 0 || in.markov_sparsity < 0 || in.memory_sparsity < 0 || in.gate_base < 0 ||
        !(in.cbar_max_norm >= 0.0)) {
        throw DomainError("complexity inputs must be non-negative");
    }
    ComplexityReport r;
    const double inv = 1.0 / in.eps;
    const double log_inv = std::log(inv);
    r.sparsity_s = in.markov_sparsity + in.g * in.memory_sparsity;
    r.max_norm = in.cbar_max_norm;
    r.leading_term = inv * static_cast<double>(r.sparsity_s) * in.t * in.cbar_max_norm;
    r.log_term = log_inv / std::log(std::max(std::numbers::e, log_inv));
    r.norm_ratio = in.norm_ratio;
    r.query_complexity = (r.leading_term + r.log_term) * in.norm_ratio;
    r.gate_multiplier = static_cast<double>(in.gate_base) +
                        std::log2(static_cast<double>(in.n) * static_cast<double>(1 + in.g * in.memory_sparsity));
    r.success_probability = 1.0 / (in.norm_ratio * in.norm_ratio);
    r.hamiltonian_query =
        static_cast<double>(in.hamiltonian_sparsity) * in.t * std::max(in.h1_max_norm * inv, in.h2_max_norm) +
        r.log_term;
    if (in.norm_ratio < 1.0) {
        r.warnings.push_back("norm ratio below 1: the solution grows, success probability estimate exceeds 1");
    }
    return r;
}

ComplexityReport complexity_estimate(const AugmentedSystem& aug, double t, double eps, double norm_ratio,
                                     Index gate_base)
{
    const HermitianSplit split = hermitian_split(aug.Cbar);
    SparseMatrix pattern = (split.H1.cwiseAbs() + split.H2.cwiseAbs()).cast<cplx>();
    pattern.prune(cplx(0.0, 0.0));
    const auto counts = row_nonzeros(pattern);

    ComplexityInputs in;
    in.n = aug.layout.n;
    in.g = aug.layout.g;
    in.markov_sparsity = aug.markov_sparsity;
    in.memory_sparsity = aug.memory_sparsity;
    in.t = t;
    in.eps = eps;
    in.cbar_max_norm = max_norm(aug.Cbar);
    in.norm_ratio = norm_ratio;
    in.gate_base = gate_base;
    in.hamiltonian_sparsity = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    in.h1_max_norm = max_norm(split.H1);
    in.h2_max_norm = max_norm(split.H2);
    return complexity_estimate(in);
}

}  // namespace ddeq
