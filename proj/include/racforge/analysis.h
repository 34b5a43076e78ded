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

#ifndef RACFORGE_ANALYSIS_H
#define RACFORGE_ANALYSIS_H

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "racforge/classical_search.h"
#include "racforge/quantum_core.h"
#include "racforge/seesaw.h"

namespace racforge {

enum class MubVerdict { Mub, NotMub, NotApplicable };

std::string_view mub_verdict_name(MubVerdict v);

struct AnalysisTolerances {
    double rank = 1e-7;
    double projective = 1e-7;
    double mub = 5e-6;
};

struct MubEntry {
    int first = 0;
    int second = 0;
    MubVerdict verdict = MubVerdict::NotApplicable;
    double defect = 0.0;
};

struct MeasurementAnalysis {
    /// Indexed [y][b].
    std::vector<std::vector<int>> ranks;
    std::vector<std::vector<double>> projectiveness_defect;
    std::vector<std::vector<bool>> projective;
    /// One entry per pair (i < j) in lexicographic order.
    std::vector<MubEntry> mub;

    bool all_projective() const;
    bool all_rank_one() const;
};

/// Number of eigenvalues above `tol`.
int operator_rank(const Matrix &m, double tol = 1e-7);
/// ||M^2 - M||_F
double projectiveness_defect(const Matrix &m);
/// max_{a,b} of ||m P^a Q^b P^a - P^a||_F and ||m Q^b P^a Q^b - Q^b||_F.
double mub_defect(const Povm &p, const Povm &q);

MeasurementAnalysis analyze(const std::vector<Povm> &measurements, const AnalysisTolerances &tol = {});

/// Cosines between the traceless parts of M_y^0 - M_y^1 under the
/// Hilbert-Schmidt product; for d = 2 these are Bloch vector cosines.
/// Requires two-outcome measurements. Zero vectors give NaN entries.
Eigen::MatrixXd measurement_cosines(const std::vector<Povm> &measurements);

/// "2^2-->1" when d = m, "2^2-(3)->1" otherwise.
std::string scenario_label(const ScenarioParams &params);

struct Report {
    /// Empty when rendered with verbose = false.
    std::string text;
    nlohmann::json record;
};

Report render_search_report(const BiasTensor &t, const SearchResult &result, bool verbose = true);
Report render_seesaw_report(const BiasTensor &t, const SeesawConfig &cfg, const SeesawOutcome &outcome,
                            const MeasurementAnalysis &analysis, bool verbose = true);

}  // namespace racforge

#endif
