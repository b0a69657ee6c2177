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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ddeq {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched vector/matrix shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (negative time, bad tolerance, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A phase-type kernel (or a model built from them) violates its defining invariants.
/// Carries every violated invariant, not just the first one.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> violations)
        : Error(what), violations_(std::move(violations))
    {
    }

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// A resolvent was requested at (or numerically on top of) a pole.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// A matrix that should be invertible is too badly conditioned to trust.
class ConditioningError : public Error {
public:
    using Error::Error;
};

/// The Schrodingerization pipeline refused to run on a system that fails its applicability gate.
class StabilityGateError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed its own a-posteriori checks.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace ddeq
