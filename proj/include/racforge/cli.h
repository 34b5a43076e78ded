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

#ifndef RACFORGE_CLI_H
#define RACFORGE_CLI_H

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "racforge/scenario.h"

namespace racforge {

/// Exit codes of the command line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitSearchTooLarge = 2,
    kExitNoConvergence = 3,
    kExitOutOfTheoryScope = 4,
};

/// Scenario and bias flags shared by every command.
struct BiasOptions {
    int n = 2;
    int d = 2;
    std::optional<int> m;
    std::string family;
    std::vector<double> weights;
    std::vector<double> y_weights;
    std::string bias_file;
    bool renormalize = false;
};

/// Builds the tensor described by the flags. `weight` overrides the scalar
/// family weight when given (used by sweeps).
BiasTensor build_bias(const BiasOptions &opts, std::optional<double> weight = std::nullopt);

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace racforge

#endif
