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
#include <vector>

#include "ddeq/phasetype.hpp"
#include "ddeq/types.hpp"

namespace ddeq {

/// One memory coupling: adds weight * (S_kernel * x_col)(t) to dx_row/dt, where S_kernel is the
/// kernel's survival function and * is the causal convolution over [0, t].
/// Indices are zero-based. Several terms may share the same (row, col).
struct KernelTerm {
    Index row = 0;
    Index col = 0;
    cplx weight{0.0, 0.0};
    PhaseType kernel;
};

/// Linear distributed-delay system  dx/dt = A x + sum_terms weight * (S * x_col).
class DelaySystem {
public:
    DelaySystem(Index n, SparseMatrix A, std::vector<KernelTerm> terms);

    Index n() const noexcept { return n_; }
    const SparseMatrix& A() const noexcept { return A_; }
    const std::vector<KernelTerm>& terms() const noexcept { return terms_; }

    /// s_A: max nonzeros per row of A.
    Index markov_sparsity() const;
    /// s_B (= s): max number of kernel terms attached to one row.
    Index memory_sparsity() const;
    /// g: max kernel dimension (0 when there are no terms).
    Index max_kernel_dim() const;

    /// Term indices grouped per row, each row ordered by column and then by input order.
    std::vector<std::vector<std::size_t>> terms_by_row() const;

private:
    Index n_;
    SparseMatrix A_;
    std::vector<KernelTerm> terms_;
};

/// How the unit-mass requirement on memory kernels is treated when compiling a system.
enum class Normalization {
    /// Reject kernels whose mean differs from 1 by more than 1e-9.
    strict,
    /// Accept any kernel; the product weight * S is kept as given and the normalized
    /// coupling weight * mean(kernel) is recorded for reporting.
    automatic,
};

/// Position of one kernel term inside the padded state.
struct Slot {
    std::size_t term = 0;  ///< index into DelaySystem::terms()
    Index col = 0;
    Index kernel_dim = 0;
    cplx normalized_weight{0.0, 0.0};
};

/// Index map of the padded augmented state ybar = (x, gamma^(0), ..., gamma^(N-1)) where every row
/// block gamma^(i) holds s slots of g components each.
struct Layout {
    Index n = 0;
    Index g = 0;
    Index s = 0;
    std::vector<std::vector<Slot>> slots;  ///< slots[i][k] is the k-th term of row i

    /// N (1 + g s)
    Index dimension() const noexcept { return n * (1 + g * s); }
    /// Number of non-padded auxiliary coordinates (sum of true kernel dimensions).
    Index aux_dimension() const;
    /// Zero-based flat index of component `component` of slot `slot` in row `row`:
    /// N + row g s + slot g + component. Throws DomainError outside the non-padded range.
    Index index_of(Index row, Index slot, Index component) const;
};

struct AugmentedSystem {
    SparseMatrix Cbar;
    Layout layout;
    Index markov_sparsity = 0;  ///< s_A of the source system
    Index memory_sparsity = 0;  ///< s_B of the source system
};

/// Generalized linear chain trick: compiles the delay system into dybar/dt = Cbar ybar.
AugmentedSystem augment(const DelaySystem& sys, Normalization mode = Normalization::automatic);

/// (x0, 0, ..., 0); auxiliary variables always start at rest.
ComplexVector initial_augmented(const ComplexVector& x0, const Layout& layout);

/// First N components of a padded state.
ComplexVector extract_x(const ComplexVector& ybar, const Layout& layout);

/// Unpadded blocks of the augmented operator: C = [[A, B'], [E, G']] of size N + M.
struct CompactBlocks {
    ComplexMatrix A;
    ComplexMatrix Bp;
    ComplexMatrix E;
    ComplexMatrix Gp;
    std::vector<Index> padded_index;  ///< compact coordinate -> coordinate of the padded state

    ComplexMatrix assemble() const;
};

CompactBlocks compact(const AugmentedSystem& aug);

/// Largest entry magnitude of a sparse matrix (0 for an empty one).
double max_norm(const SparseMatrix& m);

/// Nonzero count of every row.
std::vector<Index> row_nonzeros(const SparseMatrix& m);

}  // namespace ddeq
