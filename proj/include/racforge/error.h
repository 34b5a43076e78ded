// Copyright 2026 The rac-forge Authors
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

#ifndef RACFORGE_ERROR_H
#define RACFORGE_ERROR_H

#include <stdexcept>
#include <string>
#include <string_view>

namespace racforge {

enum class ErrorCode {
    InvalidScenario,
    InvalidWeight,
    WrongWeightArity,
    UnnormalizedCustom,
    ShapeMismatch,
    SearchTooLarge,
    WrongOutcomeCount,
    NoConvergence,
    NotProjective,
    DivisionByZero,
    OutOfTheoryScope,
    ParseError,
};

std::string_view error_code_name(ErrorCode code);

/// Exception type thrown by every racforge module. The code identifies the
/// contract violation; the message carries the human-readable detail.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {
    }

    ErrorCode code() const noexcept {
        return code_;
    }

   private:
    ErrorCode code_;
};

}  // namespace racforge

#endif
