// Copyright 2026 The nogo-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nogo_lab {

enum class ErrorKind {
    NotNormal,
    NotHermitian,
    NotSquare,
    NonFinite,
    DimensionMismatch,
    ZeroOperator,
    NotProjector,
    NotDensity,
    ConditioningOnNull,
    UnknownEigenvalue,
    NotOrthogonalFamily,
    UnregisteredObservable,
    NotCommuting,
    NotCommutingFamily,
    OrderViolation,
    DimensionTooSmall,
    InvalidPhaseSpace,
    SearchSpaceTooLarge,
    NumericalAmbiguity,
    NotDichotomic,
    CrossTalk,
    WrongScenarioShape,
    InvalidScenario,
    MissingState,
    ParseError,
    ConfigError,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotNormal: return "NotNormal";
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NotSquare: return "NotSquare";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ZeroOperator: return "ZeroOperator";
        case ErrorKind::NotProjector: return "NotProjector";
        case ErrorKind::NotDensity: return "NotDensity";
        case ErrorKind::ConditioningOnNull: return "ConditioningOnNull";
        case ErrorKind::UnknownEigenvalue: return "UnknownEigenvalue";
        case ErrorKind::NotOrthogonalFamily: return "NotOrthogonalFamily";
        case ErrorKind::UnregisteredObservable: return "UnregisteredObservable";
        case ErrorKind::NotCommuting: return "NotCommuting";
        case ErrorKind::NotCommutingFamily: return "NotCommutingFamily";
        case ErrorKind::OrderViolation: return "OrderViolation";
        case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorKind::InvalidPhaseSpace: return "InvalidPhaseSpace";
        case ErrorKind::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
        case ErrorKind::NumericalAmbiguity: return "NumericalAmbiguity";
        case ErrorKind::NotDichotomic: return "NotDichotomic";
        case ErrorKind::CrossTalk: return "CrossTalk";
        case ErrorKind::WrongScenarioShape: return "WrongScenarioShape";
        case ErrorKind::InvalidScenario: return "InvalidScenario";
        case ErrorKind::MissingState: return "MissingState";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (and the CLI exit-code mapping) can branch on it without parsing
/// the message.
class LabError : public std::runtime_error {
  public:
    LabError(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string &detail() const noexcept { return detail_; }

  private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace nogo_lab
