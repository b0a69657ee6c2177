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

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ddeq/types.hpp"

namespace ddeq {

/// Sampled solution of a linear system together with where it came from.
struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexVector> states;
    std::string solver_id;
    std::vector<ComplexVector> aux_states;    ///< optional padded augmented states
    std::vector<double> success_probabilities;  ///< optional, Schrodingerized runs only
    std::map<std::string, std::string> provenance;

    std::size_t size() const noexcept { return times.size(); }

    /// Throws Error unless times are strictly ascending and match the number of states.
    void check() const;
};

/// CSV with header `t,re_x1,im_x1,...` and 17 significant digits per value.
void write_csv(std::ostream& out, const Trajectory& trajectory);

/// Inverse of write_csv; solver_id is set to "csv".
Trajectory read_csv(std::istream& in);

/// Largest |a - b| over all common samples; throws DimensionError on mismatched shapes.
double max_abs_difference(const Trajectory& a, const Trajectory& b);

}  // namespace ddeq
