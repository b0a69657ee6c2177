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

#include "ddeq/lct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ddeq/errors.hpp"

namespace ddeq {

namespace {

constexpr double kStrictMeanTol = 1e-9;

}  // namespace

DelaySystem::DelaySystem(Index n, SparseMatrix A, std::vector<KernelTerm> terms)
    : n_(n), A_(std::move(A)), terms_(std::move(terms))
{
    if (n_ < 1) {
        throw DimensionError("delay system needs at least one state");
    }
    if (A_.rows() != n_ || A_.cols() != n_) {
        std::ostringstream os;
        os << "A is " << A_.rows() << "x" << A_.cols() << " but the system has N = " << n_;
        throw DimensionError(os.str());
    }
    A_.prune(cplx(0.0, 0.0));
    A_.makeCompressed();
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        const KernelTerm& term = terms_[t];
        if (term.row < 0 || term.row >= n_ || term.col < 0 || term.col >= n_) {
            std::ostringstream os;
            os << "kernel term " << t << " couples (" << term.row << ", " << term.col << ") outside [0, " << n_
               << ")";
            throw DimensionError(os.str());
        }
        if (!std::isfinite(term.weight.real()) || !std::isfinite(term.weight.imag())) {
            throw DomainError("kernel term weights must be finite");
        }
        require_valid(term.kernel);
    }
}

Index DelaySystem::markov_sparsity() const
{
    Index s = 0;
    for (Index i = 0; i < A_.outerSize(); ++i) {
        s = std::max<Index>(s, A_.outerIndexPtr()[i + 1] - A_.outerIndexPtr()[i]);
    }
    return s;
}

Index DelaySystem::memory_sparsity() const
{
    std::vector<Index> count(static_cast<std::size_t>(n_), 0);
    for (const auto& term : terms_) {
        ++count[static_cast<std::size_t>(term.row)];
    }
    return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

Index DelaySystem::max_kernel_dim() const
{
    Index g = 0;
    for (const auto& term : terms_) {
        g = std::max(g, term.kernel.dim());
    }
    return g;
}

std::vector<std::vector<std::size_t>> DelaySystem::terms_by_row() const
{
    std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(n_));
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        rows[static_cast<std::size_t>(terms_[t].row)].push_back(t);
    }
    for (auto& row : rows) {
        std::stable_sort(row.begin(), row.end(),
                         [&](std::size_t a, std::size_t b) { return terms_[a].col < terms_[b].col; });
    }
    return rows;
}

Index Layout::aux_dimension() const
{
    Index m = 0;
    for (const auto& row : slots) {
        for (const auto& slot : row) {
            m += slot.kernel_dim;
        }
    }
    return m;
}

Index Layout::index_of(Index row, Index slot, Index component) const
{
    if (row < 0 || row >= n) {
        throw DomainError("row index outside the system");
    }
    const auto& row_slots = slots[static_cast<std::size_t>(row)];
    if (slot < 0 || slot >= static_cast<Index>(row_slots.size())) {
        std::ostringstream os;
        os << "slot " << slot << " does not exist in row " << row << " (row has " << row_slots.size()
           << " terms, s = " << s << ")";
        throw DomainError(os.str());
    }
    if (component < 0 || component >= row_slots[static_cast<std::size_t>(slot)].kernel_dim) {
        throw DomainError("component exceeds the kernel dimension of this slot");
    }
    return n + row * g * s + slot * g + component;
}

AugmentedSystem augment(const DelaySystem& sys, Normalization mode)
{
    if (sys.terms().empty()) {
        throw DomainError(
            "system has no memory terms; it is an ordinary linear ODE and should be integrated directly");
    }

    AugmentedSystem aug;
    Layout& layout = aug.layout;
    layout.n = sys.n();
    layout.g = sys.max_kernel_dim();
    layout.s = sys.memory_sparsity();
    aug.markov_sparsity = sys.markov_sparsity();
    aug.memory_sparsity = layout.s;

    const auto by_row = sys.terms_by_row();
    layout.slots.resize(by_row.size());
    for (std::size_t i = 0; i < by_row.size(); ++i) {
        for (std::size_t t : by_row[i]) {
            const KernelTerm& term = sys.terms()[t];
            const double m = mean(term.kernel);
            if (mode == Normalization::strict && std::abs(m - 1.0) > kStrictMeanTol) {
                std::ostringstream os;
                os << "kernel of term " << t << " has mean " << m << "; strict normalization requires unit mass";
                throw ValidationError(os.str(), {os.str()});
            }
            layout.slots[i].push_back(Slot{t, term.col, term.kernel.dim(), term.weight * m});
        }
    }

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(sys.A().nonZeros()) +
                     static_cast<std::size_t>(3 * layout.aux_dimension()));
    for (Index i = 0; i < sys.A().outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(sys.A(), i); it; ++it) {
            triplets.emplace_back(it.row(), it.col(), it.value());
        }
    }

    for (Index i = 0; i < layout.n; ++i) {
        const auto& row_slots = layout.slots[static_cast<std::size_t>(i)];
        for (Index k = 0; k < static_cast<Index>(row_slots.size()); ++k) {
            const Slot& slot = row_slots[static_cast<std::size_t>(k)];
            const KernelTerm& term = sys.terms()[slot.term];
            const PhaseType& ph = term.kernel;
            const Index base = layout.index_of(i, k, 0);
            for (Index c = 0; c < slot.kernel_dim; ++c) {
                // x_i picks up weight * 1^T gamma.
                triplets.emplace_back(i, base + c, term.weight);
                // dgamma/dt = G^T gamma + alpha x_col
                triplets.emplace_back(base + c, term.col, cplx(ph.alpha(c), 0.0));
                for (Index d = 0; d < slot.kernel_dim; ++d) {
                    triplets.emplace_back(base + c, base + d, cplx(ph.G(d, c), 0.0));
                }
            }
        }
    }

    const Index dim = layout.dimension();
    aug.Cbar.resize(dim, dim);
    aug.Cbar.setFromTriplets(triplets.begin(), triplets.end());
    aug.Cbar.prune(cplx(0.0, 0.0));
    aug.Cbar.makeCompressed();
    return aug;
}

ComplexVector initial_augmented(const ComplexVector& x0, const Layout& layout)
{
    if (x0.size() != layout.n) {
        std::ostringstream os;
        os << "initial state has " << x0.size() << " entries, expected " << layout.n;
        throw DimensionError(os.str());
    }
    ComplexVector y0 = ComplexVector::Zero(layout.dimension());
    y0.head(layout.n) = x0;
    return y0;
}

ComplexVector extract_x(const ComplexVector& ybar, const Layout& layout)
{
    if (ybar.size() != layout.dimension()) {
        std::ostringstream os;
        os << "padded state has " << ybar.size() << " entries, expected " << layout.dimension();
        throw DimensionError(os.str());
    }
    return ybar.head(layout.n);
}

ComplexMatrix CompactBlocks::assemble() const
{
    const Index n = A.rows();
    const Index m = Gp.rows();
    ComplexMatrix C(n + m, n + m);
    C.topLeftCorner(n, n) = A;
    C.topRightCorner(n, m) = Bp;
    C.bottomLeftCorner(m, n) = E;
    C.bottomRightCorner(m, m) = Gp;
    return C;
}

CompactBlocks compact(const AugmentedSystem& aug)
{
    const Layout& layout = aug.layout;
    const Index n = layout.n;

    CompactBlocks blocks;
    blocks.padded_index.resize(static_cast<std::size_t>(n));
    std::iota(blocks.padded_index.begin(), blocks.padded_index.end(), Index{0});
    for (Index i = 0; i < n; ++i) {
        const auto& row_slots = layout.slots[static_cast<std::size_t>(i)];
        for (Index k = 0; k < static_cast<Index>(row_slots.size()); ++k) {
            for (Index c = 0; c < row_slots[static_cast<std::size_t>(k)].kernel_dim; ++c) {
                blocks.padded_index.push_back(layout.index_of(i, k, c));
            }
        }
    }

    const ComplexMatrix dense(aug.Cbar);
    const auto total = static_cast<Index>(blocks.padded_index.size());
    ComplexMatrix C(total, total);
    for (Index r = 0; r < total; ++r) {
        for (Index c = 0; c < total; ++c) {
            C(r, c) = dense(blocks.padded_index[static_cast<std::size_t>(r)],
                            blocks.padded_index[static_cast<std::size_t>(c)]);
        }
    }
    const Index m = total - n;
    blocks.A = C.topLeftCorner(n, n);
    blocks.Bp = C.topRightCorner(n, m);
    blocks.E = C.bottomLeftCorner(m, n);
    blocks.Gp = C.bottomRightCorner(m, m);
    return blocks;
}

double max_norm(const SparseMatrix& m)
{
    double best = 0.0;
    for (Index k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            best = std::max(best, std::abs(it.value()));
        }
    }
    return best;
}

std::vector<Index> row_nonzeros(const SparseMatrix& m)
{
    std::vector<Index> counts(static_cast<std::size_t>(m.rows()), 0);
    for (Index k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            if (it.value() != cplx(0.0, 0.0)) {
                ++counts[static_cast<std::size_t>(it.row())];
            }
        }
    }
    return counts;
}

}  // namespace ddeq
