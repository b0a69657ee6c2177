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

#include "ddeq/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "ddeq/errors.hpp"

namespace ddeq {

namespace {

std::string pair_name(Index i, Index j)
{
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

double dense_max_norm(const ComplexMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Index dense_row_sparsity(const ComplexMatrix& m)
{
    Index best = 0;
    for (Index r = 0; r < m.rows(); ++r) {
        Index count = 0;
        for (Index c = 0; c < m.cols(); ++c) {
            count += m(r, c) != cplx(0.0, 0.0) ? 1 : 0;
        }
        best = std::max(best, count);
    }
    return best;
}

bool same_kernel(const PhaseType& a, const PhaseType& b)
{
    return a.dim() == b.dim() && a.alpha == b.alpha && a.G == b.G;
}

/// Accumulates scalar memory terms, merging those that share position and kernel.
class TermCollector {
public:
    void add(Index row, Index col, cplx weight, const PhaseType& kernel)
    {
        for (auto& t : terms_) {
            if (t.row == row && t.col == col && same_kernel(t.kernel, kernel)) {
                t.weight += weight;
                return;
            }
        }
        terms_.push_back(KernelTerm{row, col, weight, kernel});
    }

    std::vector<KernelTerm> take(double threshold)
    {
        std::vector<KernelTerm> out;
        for (auto& t : terms_) {
            if (std::abs(t.weight) > threshold) {
                out.push_back(std::move(t));
            }
        }
        return out;
    }

private:
    std::vector<KernelTerm> terms_;
};

}  // namespace

DelaySystem build_gme(const GmeSpec& spec)
{
    const Index n = spec.n_states;
    std::vector<std::string> violations;
    if (n < 1) {
        throw ValidationError("GME needs at least one state", {"n_states < 1"});
    }
    if (spec.rates.rows() != n || spec.rates.cols() != n) {
        throw DimensionError("rate matrix must be n_states x n_states");
    }
    if (!spec.rates.allFinite()) {
        violations.push_back("rates must be finite");
    }
    const double scale = std::max(1.0, spec.rates.cwiseAbs().maxCoeff());
    bool any = false;
    for (Index j = 0; j < n; ++j) {
        double column = 0.0;
        for (Index i = 0; i < n; ++i) {
            column += spec.rates(i, j);
            if (i == j) {
                continue;
            }
            if (spec.rates(i, j) < 0.0) {
                violations.push_back("negative off-diagonal rate at " + pair_name(i, j));
            }
            if (spec.rates(i, j) > 0.0) {
                any = true;
                if (!spec.kernels.contains({i, j})) {
                    violations.push_back("missing kernel for rate " + pair_name(i, j));
                }
            }
        }
        if (std::abs(column) > 1e-12 * scale * static_cast<double>(n)) {
            std::ostringstream os;
            os << "column " << j << " of the rate matrix sums to " << column << ", not 0";
            violations.push_back(os.str());
        }
    }
    for (const auto& [key, kernel] : spec.kernels) {
        const auto [i, j] = key;
        if (i < 0 || j < 0 || i >= n || j >= n) {
            violations.push_back("kernel index " + pair_name(i, j) + " out of range");
        } else if (i == j) {
            violations.push_back("diagonal kernel " + pair_name(i, j) + " is implied by conservation; remove it");
        } else if (!(spec.rates(i, j) > 0.0)) {
            violations.push_back("kernel given for zero rate " + pair_name(i, j));
        }
        const auto report = validate(kernel);
        for (const auto& v : report.violations) {
            violations.push_back("kernel " + pair_name(i, j) + ": " + v);
        }
    }
    if (!any && violations.empty()) {
        violations.push_back("all transfer rates are zero; there is no memory term");
    }
    if (!violations.empty()) {
        throw ValidationError("invalid GME specification", violations);
    }

    std::vector<KernelTerm> terms;
    for (const auto& [key, kernel] : spec.kernels) {
        const auto [i, j] = key;
        const cplx w = spec.rates(i, j) / mean(kernel);
        terms.push_back(KernelTerm{i, j, w, kernel});
        terms.push_back(KernelTerm{j, j, -w, kernel});
    }
    return DelaySystem(n, SparseMatrix(n, n), std::move(terms));
}

ComplexMatrix vectorize_superop(const ComplexMatrix& X, const ComplexMatrix& Z)
{
    if (X.rows() != X.cols() || Z.rows() != Z.cols() || X.rows() != Z.rows()) {
        throw DimensionError("superoperator factors must be square and of equal size");
    }
    return Eigen::kroneckerProduct(Z.transpose(), X).eval();
}

ComplexVector vec(const ComplexMatrix& Y)
{
    if (Y.rows() != Y.cols()) {
        throw DimensionError("vec expects a square matrix");
    }
    return Eigen::Map<const ComplexVector>(Y.data(), Y.size());
}

ComplexMatrix unvec(const ComplexVector& y)
{
    const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(y.size()))));
    if (d * d != y.size()) {
        throw DimensionError("vector length is not a perfect square");
    }
    return Eigen::Map<const ComplexMatrix>(y.data(), d, d);
}

void validate_redfield(const RedfieldSpec& spec)
{
    std::vector<std::string> violations;
    const Index d = spec.H_S.rows();
    if (d < 1 || spec.H_S.cols() != d) {
        throw DimensionError("H_S must be a non-empty square matrix");
    }
    const double hscale = std::max(1.0, dense_max_norm(spec.H_S));
    if (dense_max_norm(spec.H_S - spec.H_S.adjoint()) > 1e-12 * hscale) {
        violations.push_back("H_S is not Hermitian");
    }
    if (spec.couplings.empty()) {
        violations.push_back("no system-bath couplings given");
    }
    const auto h = static_cast<Index>(spec.couplings.size());
    for (Index m = 0; m < h; ++m) {
        const ComplexMatrix& T = spec.couplings[static_cast<std::size_t>(m)];
        if (T.rows() != d || T.cols() != d) {
            violations.push_back("coupling " + std::to_string(m) + " has the wrong shape");
            continue;
        }
        const double tscale = std::max(1.0, dense_max_norm(T));
        if (dense_max_norm(T - T.adjoint()) > 1e-12 * tscale) {
            violations.push_back("coupling " + std::to_string(m) + " is not Hermitian");
        }
        const double comm = dense_max_norm(spec.H_S * T - T * spec.H_S);
        if (comm > 1e-10 * hscale * tscale) {
            std::ostringstream os;
            os << "coupling " << m << " does not commute with H_S (max |[H_S, T]| = " << comm << ")";
            violations.push_back(os.str());
        }
    }
    if (spec.correlations.empty()) {
        violations.push_back("no correlation functions given");
    }
    for (const auto& [key, components] : spec.correlations) {
        const auto [m, n] = key;
        if (m < 0 || n < 0 || m >= h || n >= h) {
            violations.push_back("correlation index " + pair_name(m, n) + " out of range");
            continue;
        }
        if (!spec.correlations.contains({n, m})) {
            violations.push_back("correlation " + pair_name(m, n) + " has no partner " + pair_name(n, m));
        }
        if (components.empty()) {
            violations.push_back("correlation " + pair_name(m, n) + " has no components");
        }
        for (const auto& c : components) {
            if (!std::isfinite(c.weight.real()) || !std::isfinite(c.weight.imag())) {
                violations.push_back("correlation " + pair_name(m, n) + " has a non-finite weight");
            }
            for (const auto& v : validate(c.kernel).violations) {
                violations.push_back("correlation " + pair_name(m, n) + " kernel: " + v);
            }
        }
    }
    if (!violations.empty()) {
        throw ValidationError("invalid Redfield specification", violations);
    }
}

std::pair<ComplexMatrix, ComplexMatrix> redfield_memory_superops(const ComplexMatrix& Tm, const ComplexMatrix& Tn)
{
    const Index d = Tm.rows();
    const ComplexMatrix I = ComplexMatrix::Identity(d, d);
    // [T_m, T_n rho] = T_m T_n rho I - T_n rho T_m
    const ComplexMatrix first = vectorize_superop(Tm * Tn, I) - vectorize_superop(Tn, Tm);
    // [T_m, rho T_n] = T_m rho T_n - I rho T_n T_m
    const ComplexMatrix second = vectorize_superop(Tm, Tn) - vectorize_superop(I, Tn * Tm);
    return {first, second};
}

DelaySystem build_redfield_dephasing(const RedfieldSpec& spec)
{
    validate_redfield(spec);
    const Index d = spec.H_S.rows();
    const Index N = d * d;
    const ComplexMatrix I = ComplexMatrix::Identity(d, d);
    const ComplexMatrix A = cplx(0.0, -1.0) * (vectorize_superop(spec.H_S, I) - vectorize_superop(I, spec.H_S));

    TermCollector collector;
    double scale = 0.0;
    auto add_matrix = [&](const ComplexMatrix& M, cplx weight, const PhaseType& kernel) {
        for (Index c = 0; c < N; ++c) {
            for (Index r = 0; r < N; ++r) {
                if (M(r, c) != cplx(0.0, 0.0)) {
                    const cplx w = weight * M(r, c);
                    scale = std::max(scale, std::abs(w));
                    collector.add(r, c, w, kernel);
                }
            }
        }
    };
    for (const auto& [key, components] : spec.correlations) {
        const auto [m, n] = key;
        const auto& Tm = spec.couplings[static_cast<std::size_t>(m)];
        const auto& Tn = spec.couplings[static_cast<std::size_t>(n)];
        const auto [first, second] = redfield_memory_superops(Tm, Tn);
        for (const auto& c : components) {
            add_matrix(first, -c.weight, c.kernel);
        }
        for (const auto& c : spec.correlations.at({n, m})) {
            add_matrix(second, std::conj(c.weight), c.kernel);
        }
    }
    std::vector<KernelTerm> terms = collector.take(1e-14 * std::max(1.0, scale));
    if (terms.empty()) {
        // Every sandwich cancelled (e.g. T = I). Keep a zero-weight diagonal memory so the result is
        // still a delay system with the requested kernels.
        const auto& kernel = spec.correlations.begin()->second.front().kernel;
        for (Index i = 0; i < N; ++i) {
            terms.push_back(KernelTerm{i, i, cplx(0.0, 0.0), kernel});
        }
    }

    std::vector<Triplet> triplets;
    for (Index c = 0; c < N; ++c) {
        for (Index r = 0; r < N; ++r) {
            if (A(r, c) != cplx(0.0, 0.0)) {
                triplets.emplace_back(r, c, A(r, c));
            }
        }
    }
    SparseMatrix As(N, N);
    As.setFromTriplets(triplets.begin(), triplets.end());
    return DelaySystem(N, std::move(As), std::move(terms));
}

RedfieldBounds redfield_bounds(const RedfieldSpec& spec, const AugmentedSystem& aug)
{
    RedfieldBounds b;
    const auto h = static_cast<double>(spec.couplings.size());
    double t_max = 0.0;
    Index t_sparsity = 0;
    for (const auto& T : spec.couplings) {
        t_max = std::max(t_max, dense_max_norm(T));
        t_sparsity = std::max(t_sparsity, dense_row_sparsity(T));
    }
    double g_max = 0.0;
    Index g_sparsity = 0;
    for (const auto& [key, components] : spec.correlations) {
        for (const auto& c : components) {
            g_max = std::max(g_max, c.kernel.G.cwiseAbs().maxCoeff());
            g_sparsity = std::max(g_sparsity, dense_row_sparsity(c.kernel.G.cast<cplx>()));
        }
    }
    b.max_norm_bound = std::max({2.0 * dense_max_norm(spec.H_S), h * h * t_max * t_max, g_max});
    b.sparsity_bound = dense_row_sparsity(spec.H_S) +
                       4 * static_cast<Index>(h * h) * t_sparsity * t_sparsity + g_sparsity;
    b.measured_max_norm = max_norm(aug.Cbar);
    const auto counts = row_nonzeros(aug.Cbar);
    b.measured_sparsity = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    return b;
}

}  // namespace ddeq
