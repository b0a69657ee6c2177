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

#include "ddeq/trajectory.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "ddeq/errors.hpp"

namespace ddeq {

namespace {

std::string format17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    return cells;
}

}  // namespace

void Trajectory::check() const
{
    if (times.size() != states.size()) {
        throw Error("trajectory has " + std::to_string(times.size()) + " times but " +
                    std::to_string(states.size()) + " states");
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) {
            throw Error("trajectory times are not strictly ascending");
        }
    }
}

void write_csv(std::ostream& out, const Trajectory& trajectory)
{
    trajectory.check();
    const Index n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
    out << "t";
    for (Index i = 1; i <= n; ++i) {
        out << ",re_x" << i << ",im_x" << i;
    }
    out << "\n";
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        out << format17(trajectory.times[k]);
        for (Index i = 0; i < n; ++i) {
            out << "," << format17(trajectory.states[k](i).real()) << "," << format17(trajectory.states[k](i).imag());
        }
        out << "\n";
    }
}

Trajectory read_csv(std::istream& in)
{
    Trajectory trajectory;
    trajectory.solver_id = "csv";
    std::string line;
    if (!std::getline(in, line)) {
        throw Error("empty trajectory CSV");
    }
    const auto header = split(line);
    if (header.empty() || header.front() != "t" || header.size() % 2 != 1) {
        throw Error("trajectory CSV header must be t,re_x1,im_x1,...");
    }
    const auto n = static_cast<Index>((header.size() - 1) / 2);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw Error("trajectory CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(header.size()));
        }
        trajectory.times.push_back(std::stod(cells[0]));
        ComplexVector x(n);
        for (Index i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(1 + 2 * i);
            x(i) = cplx(std::stod(cells[c]), std::stod(cells[c + 1]));
        }
        trajectory.states.push_back(std::move(x));
    }
    trajectory.check();
    return trajectory;
}

double max_abs_difference(const Trajectory& a, const Trajectory& b)
{
    if (a.size() != b.size()) {
        throw DimensionError("trajectories have different numbers of samples");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a.states[k].size() != b.states[k].size()) {
            throw DimensionError("trajectory states differ in dimension");
        }
        worst = std::max(worst, (a.states[k] - b.states[k]).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace ddeq
