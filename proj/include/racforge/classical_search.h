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

#ifndef RACFORGE_CLASSICAL_SEARCH_H
#define RACFORGE_CLASSICAL_SEARCH_H

#include <cstdint>
#include <optional>
#include <vector>

#include "racforge/scenario.h"

namespace racforge {

/// One deterministic behavior: encoding table E(x) and decoding tables D_y(mu).
struct ClassicalStrategy {
    std::vector<int> encoding;
    std::vector<std::vector<int>> decodings;

    bool operator==(const ClassicalStrategy &) const = default;
};

/// 0 scans (E, D) combinations, 1 scans encodings, 2 scans decoding tuples.
enum class SearchMethod { Combined = 0, Encodings = 1, Decodings = 2 };

struct SearchOptions {
    SearchMethod method = SearchMethod::Decodings;
    std::uint64_t limit = 1'000'000'000ULL;
    /// Worker threads; results are identical for every thread count.
    int threads = 1;
};

struct SearchResult {
    double value = 0.0;
    ClassicalStrategy witness;
    /// Scanned objects attaining the value; the object type depends on the method.
    std::uint64_t optimum_count = 0;
    SearchMethod method = SearchMethod::Decodings;
    std::uint64_t functions_scanned = 0;
    double elapsed_seconds = 0.0;
};

/// Values closer than this are treated as ties during enumeration.
inline constexpr double kSearchTieEps = 1e-12;

/// Throws ShapeMismatch when the tables do not fit t.params().
void validate_strategy(const ScenarioParams &params, const ClassicalStrategy &s);

double evaluate_classical(const BiasTensor &t, const ClassicalStrategy &s);

/// Best D_y(mu) for a fixed encoding; smallest b wins ties.
std::vector<std::vector<int>> optimal_decoding_for(const BiasTensor &t, const std::vector<int> &encoding);

/// Best E(x) for fixed decodings; smallest mu wins ties.
std::vector<int> optimal_encoding_for(const BiasTensor &t, const std::vector<std::vector<int>> &decodings);

/// Number of objects `method` enumerates, or nullopt if it overflows 64 bits.
std::optional<std::uint64_t> scan_count(const ScenarioParams &params, SearchMethod method);

/// Exhaustive search for the classical value. Throws SearchTooLarge when the
/// scan count exceeds options.limit.
SearchResult perform_search(const BiasTensor &t, const SearchOptions &options = {});

}  // namespace racforge

#endif
