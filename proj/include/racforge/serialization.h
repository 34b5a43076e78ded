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

#ifndef RACFORGE_SERIALIZATION_H
#define RACFORGE_SERIALIZATION_H

#include <filesystem>

#include <nlohmann/json.hpp>

#include "racforge/scenario.h"
#include "racforge/seesaw.h"
#include "racforge/theory.h"

namespace racforge {

inline constexpr const char *kSchemaTag = "rac-forge/1";

/// {"n", "m", "d", "entries": {"<x-string>:<y>:<b>": weight}}; zero weights are omitted.
nlohmann::json bias_to_json(const BiasTensor &t);
/// Missing keys are zero. Throws ParseError on malformed documents.
BiasTensor bias_from_json(const nlohmann::json &doc, bool renormalize = false);

/// {"re": [[...]], "im": [[...]]}, row major.
nlohmann::json matrix_to_json(const Matrix &m);
Matrix matrix_from_json(const nlohmann::json &doc);

/// States are stored as d x 1 matrices; measurements as lists of operators.
nlohmann::json realization_to_json(const QuantumRealization &r);
QuantumRealization realization_from_json(const nlohmann::json &doc);

nlohmann::json theory_to_json(const TheoryResult &r);

nlohmann::json read_json_file(const std::filesystem::path &path);
void write_json_file(const std::filesystem::path &path, const nlohmann::json &doc);

}  // namespace racforge

#endif
