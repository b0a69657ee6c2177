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

#include "ddeq/phasetype.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "ddeq/errors.hpp"

namespace ddeq {

namespace {

constexpr double kProbabilityTol = 1e-12;
constexpr double kHurwitzTol = 1e-10;

std::string describe(const char* what, Index i, double value)
{
    std::ostringstream os;
    os << what << " (index " << i << ", value " << value << ")";
    return os.str();
}

void require_rate(double rate)
{
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw DomainError("phase-type rates must be positive and finite");
    }
}

}  // namespace

ValidationReport validate(const PhaseType& ph)
{
    const Index g = ph.alpha.size();
    if (g < 1 || ph.G.rows() != g || ph.G.cols() != g) {
        std::ostringstream os;
        os << "phase-type dimension mismatch: alpha has " << g << " entries, G is " << ph.G.rows() << "x"
           << ph.G.cols();
        throw DimensionError(os.str());
    }

    ValidationReport report;
    auto& v = report.violations;

    if (!ph.alpha.allFinite() || !ph.G.allFinite()) {
        v.emplace_back("non-finite entries");
        return report;
    }

    for (Index i = 0; i < g; ++i) {
        if (ph.alpha(i) < 0.0) {
            v.push_back(describe("alpha entry is negative", i, ph.alpha(i)));
        }
    }
    if (std::abs(ph.alpha.sum() - 1.0) > kProbabilityTol) {
        std::ostringstream os;
        os << "alpha does not sum to one (sum " << ph.alpha.sum() << ")";
        v.push_back(os.str());
    }

    bool strictly_negative_row = false;
    for (Index i = 0; i < g; ++i) {
        if (!(ph.G(i, i) < 0.0)) {
            v.push_back(describe("G diagonal entry is not negative", i, ph.G(i, i)));
        }
        for (Index j = 0; j < g; ++j) {
            if (i != j && ph.G(i, j) < 0.0) {
                std::ostringstream os;
                os << "G off-diagonal entry (" << i << ", " << j << ") is negative (" << ph.G(i, j) << ")";
                v.push_back(os.str());
            }
        }
        const double row_sum = ph.G.row(i).sum();
        const double scale = std::max(1.0, std::abs(ph.G(i, i)));
        if (row_sum > kProbabilityTol * scale) {
            v.push_back(describe("G row sum is positive", i, row_sum));
        }
        if (row_sum < -kProbabilityTol * scale) {
            strictly_negative_row = true;
        }
    }
    if (!strictly_negative_row) {
        v.emplace_back("no row of G has a strictly negative sum (absorption is unreachable)");
    }

    const Eigen::VectorXcd eig = ph.G.eigenvalues();
    const double max_re = eig.real().maxCoeff();
    if (!(max_re < -kHurwitzTol)) {
        std::ostringstream os;
        os << "G is not Hurwitz (max eigenvalue real part " << max_re << ")";
        v.push_back(os.str());
    }
    return report;
}

void require_valid(const PhaseType& ph)
{
    ValidationReport report = validate(ph);
    if (!report.valid()) {
        std::ostringstream os;
        os << "invalid phase-type distribution: " << report.violations.front();
        if (report.violations.size() > 1) {
            os << " (and " << report.violations.size() - 1 << " more)";
        }
        throw ValidationError(os.str(), std::move(report.violations));
    }
}

PhaseTypeValues evaluate(const PhaseType& ph, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("phase-type evaluation requires a finite t >= 0");
    }
    require_valid(ph);

    const RealMatrix expm = (t * ph.G).exp();
    const RealVector ones = RealVector::Ones(ph.dim());
    const RealVector row = ph.alpha.transpose() * expm;
    const double survival = row.dot(ones);
    const double density = row.dot(-(ph.G * ones));
    return {density, 1.0 - survival, survival};
}

double mean(const PhaseType& ph)
{
    require_valid(ph);
    const Eigen::PartialPivLU<RealMatrix> lu(ph.G);
    if (!(lu.rcond() > 1e-14)) {
        throw ConditioningError("phase-type generator is numerically singular");
    }
    const RealVector x = lu.solve(RealVector::Ones(ph.dim()));
    return -ph.alpha.dot(x);
}

cplx laplace_survival(const PhaseType& ph, cplx lambda)
{
    require_valid(ph);
    const Index g = ph.dim();
    const ComplexMatrix shifted = lambda * ComplexMatrix::Identity(g, g) - ph.G.cast<cplx>();
    const Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
    if (!(lu.rcond() > 1e-13)) {
        throw SingularityError("Laplace transform evaluated at an eigenvalue of G");
    }
    const ComplexVector x = lu.solve(ComplexVector::Ones(g));
    return ph.alpha.cast<cplx>().dot(x);
}

PhaseType exponential(double rate)
{
    require_rate(rate);
    return {RealVector::Ones(1), RealMatrix::Constant(1, 1, -rate)};
}

PhaseType erlang(double rate, int k)
{
    require_rate(rate);
    if (k < 1) {
        throw DomainError("Erlang shape k must be at least 1");
    }
    const std::vector<double> rates(static_cast<std::size_t>(k), rate);
    return hypoexponential(rates);
}

PhaseType hypoexponential(std::span<const double> rates)
{
    const std::vector<double> continuation(rates.size(), 1.0);
    return coxian(rates, continuation);
}

PhaseType coxian(std::span<const double> rates, std::span<const double> continuation)
{
    if (rates.empty()) {
        throw DomainError("a Coxian chain needs at least one stage");
    }
    if (rates.size() != continuation.size()) {
        throw DimensionError("Coxian rates and continuation probabilities differ in length");
    }
    const auto g = static_cast<Index>(rates.size());
    PhaseType ph{RealVector::Zero(g), RealMatrix::Zero(g, g)};
    ph.alpha(0) = 1.0;
    for (Index i = 0; i < g; ++i) {
        const double r = rates[static_cast<std::size_t>(i)];
        const double q = continuation[static_cast<std::size_t>(i)];
        require_rate(r);
        if (!(q > 0.0 && q <= 1.0)) {
            throw DomainError("Coxian continuation probabilities must lie in (0, 1]");
        }
        ph.G(i, i) = -r;
        if (i + 1 < g) {
            ph.G(i, i + 1) = q * r;
        }
    }
    return ph;
}

PhaseType make_named(std::string_view family, const NamedParams& params)
{
    auto first_rate = [&]() {
        if (params.rates.empty()) {
            throw DomainError(std::string(family) + " needs a rate");
        }
        return params.rates.front();
    };
    if (family == "exponential") {
        return exponential(first_rate());
    }
    if (family == "erlang") {
        return erlang(first_rate(), params.k);
    }
    if (family == "hypoexponential") {
        return hypoexponential(params.rates);
    }
    if (family == "coxian") {
        return coxian(params.rates, params.continuation);
    }
    throw DomainError("unknown phase-type family '" + std::string(family) + "'");
}

}  // namespace ddeq
