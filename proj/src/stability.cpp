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

#include "ddeq/stability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "ddeq/errors.hpp"

namespace ddeq {

namespace {

Index numerical_rank(const ComplexMatrix& m, double threshold)
{
    const Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& sv = svd.singularValues();
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > threshold) {
            ++rank;
        }
    }
    return rank;
}

double spectral_norm(const ComplexMatrix& m)
{
    if (m.size() == 0) {
        return 0.0;
    }
    const Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

/// Single-linkage grouping of eigenvalues that lie within `radius` of each other.
std::vector<std::vector<cplx>> cluster(std::vector<cplx> values, double radius)
{
    std::sort(values.begin(), values.end(), [](cplx a, cplx b) {
        return a.imag() < b.imag() || (a.imag() == b.imag() && a.real() < b.real());
    });
    std::vector<std::vector<cplx>> groups;
    for (const cplx v : values) {
        bool merged = false;
        for (auto& group : groups) {
            for (const cplx member : group) {
                if (std::abs(member - v) <= radius) {
                    group.push_back(v);
                    merged = true;
                    break;
                }
            }
            if (merged) {
                break;
            }
        }
        if (!merged) {
            groups.push_back({v});
        }
    }
    return groups;
}

cplx mean_of(const std::vector<cplx>& values)
{
    cplx sum{0.0, 0.0};
    for (const cplx v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

/// alpha^T (lambda I - G)^{-1} 1 without re-validating the kernel; nullopt-like NaN on a pole.
cplx survival_transform(const PhaseType& ph, cplx lambda)
{
    const Index g = ph.dim();
    const ComplexMatrix shifted = lambda * ComplexMatrix::Identity(g, g) - ph.G.cast<cplx>();
    const Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
    if (!(lu.rcond() > 1e-13)) {
        throw SingularityError("characteristic function evaluated at a kernel pole");
    }
    return ph.alpha.cast<cplx>().dot(lu.solve(ComplexVector::Ones(g)));
}

ComplexMatrix characteristic_matrix(const DelaySystem& sys, cplx lambda)
{
    const Index n = sys.n();
    ComplexMatrix delta = lambda * ComplexMatrix::Identity(n, n) - ComplexMatrix(sys.A());
    for (const auto& term : sys.terms()) {
        delta(term.row, term.col) -= term.weight * survival_transform(term.kernel, lambda);
    }
    return delta;
}

cplx determinant(const ComplexMatrix& m)
{
    if (m.size() == 0) {
        return {1.0, 0.0};
    }
    return Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
}

/// Net phase change of f along the path z(s), s in [0, 1], divided by 2 pi.
double winding(const std::function<cplx(double)>& path, const std::function<cplx(cplx)>& f, int segments)
{
    constexpr double kMaxStep = std::numbers::pi / 6.0;
    constexpr int kMaxDepth = 48;

    std::function<double(double, double, cplx, cplx, int)> accumulate = [&](double s0, double s1, cplx f0, cplx f1,
                                                                            int depth) -> double {
        const double step = std::arg(f1 / f0);
        if (std::abs(step) <= kMaxStep || depth >= kMaxDepth) {
            return step;
        }
        const double mid = 0.5 * (s0 + s1);
        const cplx fm = f(path(mid));
        return accumulate(s0, mid, f0, fm, depth + 1) + accumulate(mid, s1, fm, f1, depth + 1);
    };

    double total = 0.0;
    cplx prev = f(path(0.0));
    for (int k = 1; k <= segments; ++k) {
        const double s0 = static_cast<double>(k - 1) / segments;
        const double s1 = static_cast<double>(k) / segments;
        const cplx next = f(path(s1));
        total += accumulate(s0, s1, prev, next, 0);
        prev = next;
    }
    return total / (2.0 * std::numbers::pi);
}

}  // namespace

StabilityReport semistability_of_matrix(const ComplexMatrix& C, const StabilityTolerances& tol)
{
    if (C.rows() != C.cols()) {
        throw DimensionError("semi-stability needs a square matrix");
    }
    if (!C.allFinite()) {
        throw DomainError("matrix has non-finite entries");
    }

    StabilityReport report;
    const Index n = C.rows();
    if (n == 0) {
        report.semi_stable = true;
        return report;
    }

    const Eigen::ComplexEigenSolver<ComplexMatrix> solver(C, false);
    if (solver.info() != Eigen::Success) {
        const Eigen::JacobiSVD<ComplexMatrix> svd(C);
        const auto& sv = svd.singularValues();
        std::ostringstream os;
        os << "eigenvalue solver failed (2-norm condition estimate " << sv(0) / sv(sv.size() - 1) << ")";
        throw NumericalError(os.str());
    }

    const ComplexVector& eig = solver.eigenvalues();
    report.eigenvalues.assign(eig.data(), eig.data() + eig.size());
    report.max_real_part = eig.real().maxCoeff();

    std::vector<cplx> on_axis;
    for (const cplx v : report.eigenvalues) {
        if (std::abs(v.real()) <= tol.axis) {
            on_axis.push_back(v);
        }
    }
    const double rank_threshold = tol.rank * spectral_norm(C);
    for (const auto& group : cluster(on_axis, tol.axis)) {
        const cplx center = mean_of(group);
        const ComplexMatrix shifted = center * ComplexMatrix::Identity(n, n) - C;
        AxisEigenvalue axis;
        axis.value = center;
        axis.algebraic = static_cast<Index>(group.size());
        axis.geometric = n - numerical_rank(shifted, rank_threshold);
        report.imaginary_axis.push_back(axis);
    }

    report.semi_stable = report.max_real_part <= tol.max_real_part;
    for (const auto& axis : report.imaginary_axis) {
        report.semi_stable = report.semi_stable && axis.semi_simple();
    }
    report.h1_max_eig = check_h1_negativity(C).max_eig;
    return report;
}

cplx dde_characteristic(const DelaySystem& sys, cplx lambda)
{
    return determinant(characteristic_matrix(sys, lambda));
}

IdentityReport check_characteristic_identity(const DelaySystem& sys, const AugmentedSystem& aug,
                                             const std::vector<cplx>& samples, double threshold)
{
    if (aug.layout.n != sys.n()) {
        throw DimensionError("augmented system does not belong to this delay system");
    }
    const CompactBlocks blocks = compact(aug);
    const ComplexMatrix C = blocks.assemble();
    const Index n = blocks.A.rows();
    const Index m = blocks.Gp.rows();
    const ComplexVector g_spectrum = Eigen::ComplexEigenSolver<ComplexMatrix>(blocks.Gp, false).eigenvalues();

    IdentityReport report;
    report.passed = true;
    for (const cplx lambda : samples) {
        IdentitySample sample;
        sample.lambda = lambda;
        const double guard = 1e-8 * std::max(1.0, std::abs(lambda));
        for (Index k = 0; k < g_spectrum.size(); ++k) {
            if (std::abs(lambda - g_spectrum(k)) <= guard) {
                sample.skipped = true;
            }
        }
        if (sample.skipped) {
            ++report.skipped;
            report.samples.push_back(sample);
            continue;
        }

        const ComplexMatrix g_lambda = lambda * ComplexMatrix::Identity(m, m) - blocks.Gp;
        const Eigen::PartialPivLU<ComplexMatrix> lu(g_lambda);
        const ComplexMatrix schur =
            lambda * ComplexMatrix::Identity(n, n) - blocks.A - blocks.Bp * lu.solve(blocks.E);
        sample.full_determinant = determinant(lambda * ComplexMatrix::Identity(n + m, n + m) - C);
        sample.schur_determinant = lu.determinant() * determinant(schur);

        const double scale = std::max({std::abs(sample.full_determinant), std::abs(sample.schur_determinant),
                                       std::numeric_limits<double>::min()});
        sample.residual = std::abs(sample.full_determinant - sample.schur_determinant) / scale;
        report.max_residual = std::max(report.max_residual, sample.residual);
        report.passed = report.passed && sample.residual <= threshold;
        report.samples.push_back(sample);
    }
    return report;
}

HermitianPartCheck check_h1_negativity(const ComplexMatrix& C, double margin, double tol)
{
    if (C.rows() != C.cols()) {
        throw DimensionError("Hermitian part needs a square matrix");
    }
    HermitianPartCheck check;
    if (C.size() == 0) {
        return check;
    }
    const ComplexMatrix h1 = 0.5 * (C + C.adjoint());
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h1, Eigen::EigenvaluesOnly);
    check.max_eig = solver.eigenvalues().maxCoeff();
    check.shift = check.max_eig > tol ? check.max_eig + margin : 0.0;
    return check;
}

RootProbeReport probe_characteristic_roots(const DelaySystem& sys, const RootProbeOptions& options)
{
    const Index n = sys.n();
    RootProbeReport report;

    double bound = ComplexMatrix(sys.A()).norm();
    for (const auto& term : sys.terms()) {
        bound += std::abs(term.weight) * mean(term.kernel);
    }
    report.radius = bound + 1.0;
    const double radius = report.radius;
    const double offset = options.axis_offset;

    auto h = [&](cplx lambda) { return dde_characteristic(sys, lambda); };

    // Counter-clockwise boundary of {Re > offset, |lambda - offset| < radius}: the right semicircle
    // from -i R to +i R, then straight back down the line Re = offset.
    const std::function<cplx(double)> arc = [&](double s) {
        const double theta = -0.5 * std::numbers::pi + s * std::numbers::pi;
        return cplx(offset, 0.0) + radius * std::polar(1.0, theta);
    };
    const std::function<cplx(double)> line = [&](double s) { return cplx(offset, radius * (1.0 - 2.0 * s)); };
    const double turns = winding(arc, h, 512) + winding(line, h, 2048);
    report.right_half_plane_roots = static_cast<Index>(std::lround(turns));

    // Imaginary-axis roots: local minima of the relative smallest singular value of the
    // characteristic matrix along i*[-R, R].
    auto relative_sigma_min = [&](double omega) {
        const ComplexMatrix delta = characteristic_matrix(sys, cplx(0.0, omega));
        const Eigen::JacobiSVD<ComplexMatrix> svd(delta);
        const auto& sv = svd.singularValues();
        return sv(n - 1) / std::max(sv(0), std::numeric_limits<double>::min());
    };

    const Index points = std::max<Index>(options.axis_scan_points | 1, 3);
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (Index k = 0; k < points; ++k) {
        grid[static_cast<std::size_t>(k)] = -radius + 2.0 * radius * static_cast<double>(k) / (points - 1);
    }
    grid[static_cast<std::size_t>(points / 2)] = 0.0;
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        values[k] = relative_sigma_min(grid[k]);
    }

    std::vector<double> roots;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const bool left_ok = k == 0 || values[k] <= values[k - 1];
        const bool right_ok = k + 1 == grid.size() || values[k] <= values[k + 1];
        if (!left_ok || !right_ok) {
            continue;
        }
        double lo = k == 0 ? grid[k] : grid[k - 1];
        double hi = k + 1 == grid.size() ? grid[k] : grid[k + 1];
        double best = grid[k];
        double best_value = values[k];
        // Golden-section refinement of the bracketed minimum.
        const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = hi - ratio * (hi - lo);
        double b = lo + ratio * (hi - lo);
        double fa = relative_sigma_min(a);
        double fb = relative_sigma_min(b);
        for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, radius); ++it) {
            if (fa < fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - ratio * (hi - lo);
                fa = relative_sigma_min(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + ratio * (hi - lo);
                fb = relative_sigma_min(b);
            }
        }
        for (const auto& [x, fx] : {std::pair{a, fa}, std::pair{b, fb}}) {
            if (fx < best_value) {
                best = x;
                best_value = fx;
            }
        }
        if (best_value > options.axis_root_tol) {
            continue;
        }
        const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](double r) {
            return std::abs(r - best) <= 10.0 * options.multiplicity_radius;
        });
        if (!duplicate) {
            roots.push_back(best);
        }
    }

    std::vector<cplx> poles;
    for (const auto& term : sys.terms()) {
        const ComplexVector eig = term.kernel.G.eigenvalues();
        poles.insert(poles.end(), eig.data(), eig.data() + eig.size());
    }

    for (const double omega : roots) {
        const cplx center(0.0, omega);
        const double rho = options.multiplicity_radius;
        const std::function<cplx(double)> circle = [&](double s) {
            return center + rho * std::polar(1.0, 2.0 * std::numbers::pi * s);
        };
        Index enclosed_poles = 0;
        for (const cplx p : poles) {
            if (std::abs(p - center) < rho) {
                ++enclosed_poles;
            }
        }
        AxisEigenvalue axis;
        axis.value = center;
        axis.algebraic = static_cast<Index>(std::lround(winding(circle, h, 256))) + enclosed_poles;

        const ComplexMatrix delta = characteristic_matrix(sys, center);
        const Eigen::JacobiSVD<ComplexMatrix> svd(delta);
        const auto& sv = svd.singularValues();
        Index nullity = 0;
        for (Index k = 0; k < sv.size(); ++k) {
            if (sv(k) <= options.axis_root_tol * std::max(sv(0), 1.0)) {
                ++nullity;
            }
        }
        axis.geometric = nullity;
        report.imaginary_axis.push_back(axis);
    }

    report.semi_stable = report.right_half_plane_roots == 0;
    for (const auto& axis : report.imaginary_axis) {
        report.semi_stable = report.semi_stable && axis.semi_simple();
    }
    return report;
}

}  // namespace ddeq
