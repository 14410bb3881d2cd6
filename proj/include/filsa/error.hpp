// Copyright 2026 The filsa Authors.
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

namespace filsa {

enum class ErrorCode {
    InvalidArgument,
    UnassignedPattern,
    EmptySet,
    OutOfDomain,
    IndexOutOfRange,
    DivergedIterate,
    WindowExceedsTrace,
    DegenerateGeometry,
    StepTooLarge,
    EmptyTrace,
    ConfigInvalid,
    IoFailure,
};

[[nodiscard]] constexpr const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::UnassignedPattern: return "UnassignedPattern";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::DivergedIterate: return "DivergedIterate";
        case ErrorCode::WindowExceedsTrace: return "WindowExceedsTrace";
        case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorCode::StepTooLarge: return "StepTooLarge";
        case ErrorCode::EmptyTrace: return "EmptyTrace";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// C API can translate it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace filsa
