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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddeq/types.hpp"

namespace ddeq {

/**
 * Phase-type distribution PH(G, alpha): the absorption time of a finite continuous-time
 * Markov chain started from the law `alpha` and evolving with the sub-generator `G`.
 *
 * The survival function S(t) = alpha^T exp(tG) 1 is the memory kernel shape used everywhere
 * else in the library.
 */
struct PhaseType {
    RealVector alpha;
    RealMatrix G;

    Index dim() const noexcept { return alpha.size(); }
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool valid() const noexcept { return violations.empty(); }
};

/// Lists every violated invariant. Throws DimensionError when alpha and G disagree in size.
ValidationReport validate(const PhaseType& ph);

/// Throws ValidationError (carrying all violations) unless `ph` is valid.
void require_valid(const PhaseType& ph);

struct PhaseTypeValues {
    double density;
    double cdf;
    double survival;
};

/// Density, distribution and survival function at time t >= 0.
PhaseTypeValues evaluate(const PhaseType& ph, double t);

/// Mean absorption time -alpha^T G^{-1} 1, which is also the integral of the survival function.
double mean(const PhaseType& ph);

/// Laplace transform of the survival function, alpha^T (lambda I - G)^{-1} 1.
cplx laplace_survival(const PhaseType& ph, cplx lambda);

PhaseType exponential(double rate);
PhaseType erlang(double rate, int k);
PhaseType hypoexponential(std::span<const double> rates);

/// Coxian chain: stage i has rate rates[i] and moves on to stage i+1 with probability
/// continuation[i] (absorbing otherwise). The last stage always absorbs; its continuation
/// entry must still lie in (0, 1].
PhaseType coxian(std::span<const double> rates, std::span<const double> continuation);

struct NamedParams {
    std::vector<double> rates;
    std::vector<double> continuation;
    int k = 1;
};

/// Builds one of the named families: "exponential" (rates[0]), "erlang" (rates[0], k),
/// "hypoexponential" (rates) or "coxian" (rates, continuation).
PhaseType make_named(std::string_view family, const NamedParams& params);

}  // namespace ddeq
