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

#include <vector>

#include "ddeq/lct.hpp"
#include "ddeq/types.hpp"

namespace ddeq {

struct StabilityTolerances {
    double max_real_part = 1e-9;  ///< eigenvalues with Re <= this count as non-growing
    double axis = 1e-7;           ///< |Re| <= this counts as "on the imaginary axis"
    double rank = 1e-9;           ///< singular values <= rank * ||C||_2 are treated as zero
};

/// A cluster of eigenvalues sitting on the imaginary axis.
struct AxisEigenvalue {
    cplx value;
    Index algebraic = 0;
    Index geometric = 0;

    bool semi_simple() const noexcept { return algebraic == geometric; }
};

struct StabilityReport {
    std::vector<cplx> eigenvalues;
    double max_real_part = 0.0;
    std::vector<AxisEigenvalue> imaginary_axis;
    bool semi_stable = false;
    double h1_max_eig = 0.0;
    double shift_applied = 0.0;
};

/// Full-spectrum semi-stability test: every eigenvalue in the closed left half-plane and every
/// imaginary-axis eigenvalue semi-simple.
StabilityReport semistability_of_matrix(const ComplexMatrix& C, const StabilityTolerances& tol = {});

/// det(lambda I - A - Khat(lambda)) with Khat_ij = sum over terms on (i, j) of weight * Laplace(S).
cplx dde_characteristic(const DelaySystem& sys, cplx lambda);

struct IdentitySample {
    cplx lambda;
    cplx full_determinant{0.0, 0.0};   ///< det(lambda I - C)
    cplx schur_determinant{0.0, 0.0};  ///< det(G_lambda) det(lambda I - A - B' G_lambda^{-1} E)
    double residual = 0.0;
    bool skipped = false;  ///< lambda hit the spectrum of G'
};

struct IdentityReport {
    std::vector<IdentitySample> samples;
    double max_residual = 0.0;
    Index skipped = 0;
    bool passed = false;
};

/// Checks the Schur-complement factorization of the augmented characteristic polynomial at every
/// sample. Samples that fall on the spectrum of G' are skipped and reported.
IdentityReport check_characteristic_identity(const DelaySystem& sys, const AugmentedSystem& aug,
                                             const std::vector<cplx>& samples, double threshold = 1e-8);

struct HermitianPartCheck {
    double max_eig = 0.0;  ///< lambda_max((C + C^H) / 2)
    double shift = 0.0;    ///< recommended c so that C - c I has a negative semi-definite Hermitian part
};

HermitianPartCheck check_h1_negativity(const ComplexMatrix& C, double margin = 0.0, double tol = 1e-9);

struct RootProbeOptions {
    double axis_offset = 1e-6;  ///< the right-half-plane count uses the contour Re(lambda) = axis_offset
    Index axis_scan_points = 4001;
    double axis_root_tol = 1e-7;
    double multiplicity_radius = 1e-3;
};

struct RootProbeReport {
    double radius = 0.0;  ///< bound on |lambda| for any root with Re(lambda) >= 0
    Index right_half_plane_roots = 0;
    std::vector<AxisEigenvalue> imaginary_axis;
    bool semi_stable = false;
};

/// Semi-stability decided from the delay characteristic function alone (no augmented matrix):
/// argument-principle root count on a right half-disk, plus an imaginary-axis scan whose roots get
/// their order from a small contour and their geometric multiplicity from the nullity of
/// lambda I - A - Khat(lambda).
RootProbeReport probe_characteristic_roots(const DelaySystem& sys, const RootProbeOptions& options = {});

}  // namespace ddeq
