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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <vector>

#include "ddeq/errors.hpp"
#include "ddeq/phasetype.hpp"
#include "support/suite.hpp"

using namespace ddeq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PhaseType make(std::vector<double> alpha, std::vector<std::vector<double>> G)
{
    PhaseType ph;
    const auto n = static_cast<Index>(alpha.size());
    ph.alpha = Eigen::Map<RealVector>(alpha.data(), n);
    const auto m = static_cast<Index>(G.size());
    ph.G = RealMatrix(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) {
            ph.G(i, j) = G[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return ph;
}

double erlang_survival(double r, int k, double t)
{
    double sum = 0.0;
    double term = 1.0;
    for (int n = 0; n < k; ++n) {
        sum += term;
        term *= r * t / (n + 1);
    }
    return std::exp(-r * t) * sum;
}

/// Composite Simpson on [a, b] with m (even) panels.
template <class F>
auto simpson(F f, double a, double b, int m)
{
    const double h = (b - a) / m;
    auto sum = f(a) + f(b);
    for (int i = 1; i < m; ++i) {
        sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    }
    return sum * (h / 3.0);
}

std::vector<PhaseType> sample_kernels()
{
    std::vector<PhaseType> out{exponential(1.0), exponential(4.0), erlang(2.0, 3), erlang(0.7, 2),
                               hypoexponential(std::vector<double>{1.0, 2.0, 5.0}),
                               coxian(std::vector<double>{1.0, 2.0}, std::vector<double>{0.5, 1.0})};
    testing::Rng rng(11);
    for (int i = 0; i < 6; ++i) {
        out.push_back(testing::random_kernel(rng));
    }
    return out;
}

}  // namespace

TEST_CASE("validate accepts and rejects generators", "[phasetype]")
{
    CHECK(validate(make({1.0}, {{-1.0}})).valid());
    CHECK(validate(make({1.0, 0.0}, {{-2.0, 2.0}, {0.0, -3.0}})).valid());

    const auto bad = validate(make({0.5, 0.5}, {{-1.0, 2.0}, {0.0, -1.0}}));
    CHECK_FALSE(bad.valid());
    CHECK_THROWS_AS(require_valid(make({0.5, 0.5}, {{-1.0, 2.0}, {0.0, -1.0}})), ValidationError);

    CHECK_FALSE(validate(make({0.9}, {{-1.0}})).valid());
    CHECK_FALSE(validate(make({1.1, -0.1}, {{-1.0, 0.0}, {0.0, -1.0}})).valid());
    CHECK_FALSE(validate(make({1.0, 0.0}, {{-1.0, -0.5}, {0.0, -1.0}})).valid());
    // Closed class: the second phase never leaves.
    CHECK_FALSE(validate(make({1.0, 0.0}, {{-1.0, 1.0}, {0.0, 0.0}})).valid());
    CHECK_THROWS_AS(validate(make({1.0, 0.0}, {{-1.0}})), DimensionError);
}

TEST_CASE("evaluate matches closed forms", "[phasetype]")
{
    const auto e1 = evaluate(exponential(1.0), 0.0);
    CHECK_THAT(e1.density, WithinAbs(1.0, 1e-15));
    CHECK_THAT(e1.cdf, WithinAbs(0.0, 1e-15));
    CHECK_THAT(e1.survival, WithinAbs(1.0, 1e-15));

    CHECK_THAT(evaluate(exponential(2.0), 0.5).survival, WithinRel(std::exp(-1.0), 1e-13));
    CHECK_THAT(evaluate(erlang(1.0, 2), 1.0).survival, WithinRel(0.7357588823428847, 1e-13));
    CHECK_THAT(evaluate(erlang(2.0, 2), 1.0).survival, WithinRel(0.40600584970983811, 1e-13));
    for (const double t : {0.1, 0.7, 2.5, 9.0}) {
        CHECK_THAT(evaluate(erlang(1.3, 3), t).survival, WithinRel(erlang_survival(1.3, 3, t), 1e-12));
    }
    CHECK_THROWS_AS(evaluate(exponential(1.0), -0.1), DomainError);
}

TEST_CASE("survival, cdf and density are consistent", "[phasetype][property]")
{
    for (const auto& ph : sample_kernels()) {
        const double m = mean(ph);
        const double h = 1e-5 * m;
        for (int k = 0; k <= 40; ++k) {
            const double t = 20.0 * m * k / 40.0;
            const auto v = evaluate(ph, t);
            CHECK_THAT(v.survival, WithinAbs(1.0 - v.cdf, 1e-12));
            if (t > h) {
                const double dS = (evaluate(ph, t + h).survival - evaluate(ph, t - h).survival) / (2.0 * h);
                CHECK(std::abs(dS + v.density) <= 1e-6);
            }
        }
    }
}

TEST_CASE("density integrates to one and survival to the mean", "[phasetype][property]")
{
    for (const auto& ph : sample_kernels()) {
        const double m = mean(ph);
        const double total = simpson([&](double t) { return evaluate(ph, t).density; }, 0.0, 40.0 * m, 4000);
        const double area = simpson([&](double t) { return evaluate(ph, t).survival; }, 0.0, 40.0 * m, 4000);
        CHECK_THAT(total, WithinAbs(1.0, 1e-6));
        CHECK_THAT(area, WithinAbs(m, 1e-6));
    }
}

TEST_CASE("mean of named families", "[phasetype]")
{
    CHECK_THAT(mean(exponential(4.0)), WithinRel(0.25, 1e-14));
    CHECK_THAT(mean(erlang(2.0, 3)), WithinRel(1.5, 1e-14));
    // Continuation 0.5 after stage one: 1/1 + 0.5 * 1/2.
    const auto cox = coxian(std::vector<double>{1.0, 2.0}, std::vector<double>{0.5, 1.0});
    CHECK_THAT(mean(cox), WithinRel(1.25, 1e-14));
    const double quad = simpson([&](double t) { return evaluate(cox, t).survival; }, 0.0, 60.0, 6000);
    CHECK_THAT(mean(cox), WithinAbs(quad, 1e-8));
}

TEST_CASE("Laplace transform of the survival function", "[phasetype]")
{
    CHECK_THAT(std::real(laplace_survival(exponential(3.0), 0.0)), WithinRel(1.0 / 3.0, 1e-14));
    CHECK_THAT(std::abs(laplace_survival(exponential(1.0), 1.0) - 0.5), WithinAbs(0.0, 1e-14));
    CHECK_THAT(std::abs(laplace_survival(erlang(1.0, 2), 1.0) - 0.75), WithinAbs(0.0, 1e-14));

    for (const auto& ph : sample_kernels()) {
        const double m = mean(ph);
        for (const cplx lambda : {cplx(0.1, 0.0), cplx(1.0, 0.0), cplx(1.0, 2.0)}) {
            const cplx quad = simpson([&](double t) { return std::exp(-lambda * t) * evaluate(ph, t).survival; },
                                      0.0, 60.0 * m, 12000);
            CHECK(std::abs(laplace_survival(ph, lambda) - quad) <= 1e-6);
        }
    }
    // -1 is the eigenvalue of G for exponential(1): (lambda I - G) is singular there.
    CHECK_THROWS_AS(laplace_survival(exponential(1.0), -1.0), SingularityError);
}

TEST_CASE("named constructors", "[phasetype]")
{
    const auto e = erlang(3.0, 1);
    REQUIRE(e.dim() == 1);
    CHECK(e.alpha(0) == 1.0);
    CHECK(e.G(0, 0) == -3.0);

    const std::vector<double> rates{1.0, 2.0};
    const auto hypo = hypoexponential(rates);
    const auto cox = coxian(rates, std::vector<double>{1.0, 1.0});
    CHECK(hypo.alpha == cox.alpha);
    CHECK(hypo.G == cox.G);

    NamedParams p;
    p.rates = {2.0};
    p.k = 2;
    CHECK_THAT(evaluate(make_named("erlang", p), 1.0).survival, WithinRel(3.0 * std::exp(-2.0), 1e-13));
    CHECK_THROWS_AS(make_named("weibull", p), DomainError);
    CHECK_THROWS(erlang(1.0, 0));
    CHECK_THROWS(exponential(-1.0));
    CHECK_THROWS(coxian(rates, std::vector<double>{1.5, 1.0}));

    for (const auto& ph : sample_kernels()) {
        CHECK(validate(ph).valid());
    }
}
