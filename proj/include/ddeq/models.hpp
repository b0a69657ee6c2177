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

#include <map>
#include <utility>
#include <vector>

#include "ddeq/lct.hpp"

namespace ddeq {

/// Generalized master equation dp/dt = sum_j int_0^t R_ij(tau) p_j(t - tau) dtau with
/// R_ij = r_ij K_ij for i != j and the diagonal fixed by conservation.
struct GmeSpec {
    Index n_states = 0;
    RealMatrix rates;  ///< r; off-diagonal >= 0, columns sum to zero
    std::map<std::pair<Index, Index>, PhaseType> kernels;  ///< (i, j) for every r_ij > 0, i != j
};

/// Each r_ij > 0 gives a gain term (i, j) and a loss term (j, j), both with weight +-r_ij / mean(K_ij)
/// on the survival function of K_ij, so the memory integral has total mass r_ij and 1^T p is conserved.
DelaySystem build_gme(const GmeSpec& spec);

/// Z^T (x) X, so that vec(X Y Z) = (Z^T (x) X) vec(Y) with column stacking.
ComplexMatrix vectorize_superop(const ComplexMatrix& X, const ComplexMatrix& Z);

/// Column-major stacking: Y_11, Y_21, ..., Y_d1, Y_12, ...
ComplexVector vec(const ComplexMatrix& Y);
ComplexMatrix unvec(const ComplexVector& y);

struct CorrelationComponent {
    cplx weight{1.0, 0.0};
    PhaseType kernel;  ///< contributes weight * S(tau)
};

struct RedfieldSpec {
    ComplexMatrix H_S;
    std::vector<ComplexMatrix> couplings;  ///< T_m
    /// W_mn(tau) = sum_c w_c S_c(tau); (n, m) must be present whenever (m, n) is.
    std::map<std::pair<Index, Index>, std::vector<CorrelationComponent>> correlations;
};

/// Throws ValidationError listing every violated assumption (Hermiticity, [H_S, T_m] = 0, shapes,
/// missing transposed correlations).
void validate_redfield(const RedfieldSpec& spec);

/// Vectorized dephasing Redfield equation
///   d rho/dt = -i[H_S, rho] - sum_mn int (W_mn [T_m, T_n rho] - W*_nm [T_m, rho T_n]).
/// A = -i (I (x) H_S - H_S^T (x) I); every nonzero entry of a memory superoperator becomes a scalar
/// kernel term, with entries sharing a position and a kernel merged.
DelaySystem build_redfield_dephasing(const RedfieldSpec& spec);

/// Matrix form of the memory superoperator multiplying W_mn (first) and W*_nm (second).
std::pair<ComplexMatrix, ComplexMatrix> redfield_memory_superops(const ComplexMatrix& Tm, const ComplexMatrix& Tn);

struct RedfieldBounds {
    double max_norm_bound = 0.0;  ///< max(2 ||H||_max, h^2 ||T||_max^2, max ||G||_max)
    Index sparsity_bound = 0;     ///< s(H) + 4 h^2 max s(T)^2 + max s(G)
    double measured_max_norm = 0.0;
    Index measured_sparsity = 0;

    bool holds() const noexcept { return measured_max_norm <= max_norm_bound * (1.0 + 1e-12) && measured_sparsity <= sparsity_bound; }
};

RedfieldBounds redfield_bounds(const RedfieldSpec& spec, const AugmentedSystem& aug);

}  // namespace ddeq
