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

#include "racforge/analysis.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "racforge/error.h"

namespace racforge {

namespace {

constexpr std::string_view kRule = "==========================================================";
constexpr std::string_view kEnd = "------------------- End of computation -------------------";

std::string format(const char *fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string list(const std::vector<int> &v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + std::to_string(v[i]);
    }
    return out + "]";
}

void banner(std::ostringstream &os) {
    os << kRule << "\n                        rac-forge\n" << kRule << "\n\n";
    os << "----------------- Summary of computation -----------------\n\n";
}

}  // namespace

std::string_view mub_verdict_name(MubVerdict v) {
    switch (v) {
        case MubVerdict::Mub:
            return "MUB";
        case MubVerdict::NotMub:
            return "Not MUB";
        case MubVerdict::NotApplicable:
            return "N/A";
    }
    return "?";
}

bool MeasurementAnalysis::all_projective() const {
    for (const auto &row : projective) {
        for (bool p : row) {
            if (!p) {
                return false;
            }
        }
    }
    return true;
}

bool MeasurementAnalysis::all_rank_one() const {
    for (const auto &row : ranks) {
        for (int r : row) {
            if (r != 1) {
                return false;
            }
        }
    }
    return true;
}

int operator_rank(const Matrix &m, double tol) {
    auto ev = hermitian_eigenvalues(m);
    return static_cast<int>((ev.array() > tol).count());
}

double projectiveness_defect(const Matrix &m) {
    return (m * m - m).norm();
}

double mub_defect(const Povm &p, const Povm &q) {
    const double k = p.size();
    double worst = 0.0;
    for (const auto &pa : p.outcomes) {
        for (const auto &qb : q.outcomes) {
            worst = std::max(worst, (k * pa * qb * pa - pa).norm());
            worst = std::max(worst, (k * qb * pa * qb - qb).norm());
        }
    }
    return worst;
}

MeasurementAnalysis analyze(const std::vector<Povm> &measurements, const AnalysisTolerances &tol) {
    MeasurementAnalysis out;
    std::vector<bool> rank_one_projective;
    for (const auto &povm : measurements) {
        std::vector<int> ranks;
        std::vector<double> defects;
        std::vector<bool> projective;
        bool eligible = true;
        for (const auto &m : povm.outcomes) {
            ranks.push_back(operator_rank(m, tol.rank));
            defects.push_back(projectiveness_defect(m));
            projective.push_back(defects.back() < tol.projective);
            eligible = eligible && projective.back() && ranks.back() == 1;
        }
        out.ranks.push_back(std::move(ranks));
        out.projectiveness_defect.push_back(std::move(defects));
        out.projective.push_back(std::move(projective));
        rank_one_projective.push_back(eligible);
    }
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        for (std::size_t j = i + 1; j < measurements.size(); ++j) {
            MubEntry e{static_cast<int>(i), static_cast<int>(j), MubVerdict::NotApplicable, 0.0};
            if (rank_one_projective[i] && rank_one_projective[j]) {
                e.defect = mub_defect(measurements[i], measurements[j]);
                e.verdict = e.defect < tol.mub ? MubVerdict::Mub : MubVerdict::NotMub;
            }
            out.mub.push_back(e);
        }
    }
    return out;
}

Eigen::MatrixXd measurement_cosines(const std::vector<Povm> &measurements) {
    const auto n = static_cast<Eigen::Index>(measurements.size());
    std::vector<Matrix> diffs;
    for (const auto &povm : measurements) {
        if (povm.size() != 2) {
            throw Error(ErrorCode::WrongOutcomeCount, "measurement cosines need two-outcome measurements");
        }
        Matrix a = povm.outcomes[0] - povm.outcomes[1];
        a -= (a.trace() / static_cast<double>(a.rows())) * Matrix::Identity(a.rows(), a.cols());
        diffs.push_back(std::move(a));
    }
    Eigen::MatrixXd cos(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto &a = diffs[static_cast<std::size_t>(i)];
            const auto &b = diffs[static_cast<std::size_t>(j)];
            cos(i, j) = (a.adjoint() * b).trace().real() / (a.norm() * b.norm());
        }
    }
    return cos;
}

std::string scenario_label(const ScenarioParams &params) {
    std::string base = std::to_string(params.n) + "^" + std::to_string(params.m);
    if (params.d == params.m) {
        return base + "-->1";
    }
    return base + "-(" + std::to_string(params.d) + ")->1";
}

Report render_search_report(const BiasTensor &t, const SearchResult &result, bool verbose) {
    const auto &p = t.params();
    Report rep;
    rep.record = {
        {"schema", "rac-forge/1"},
        {"kind", "search"},
        {"n", p.n},
        {"m", p.m},
        {"d", p.d},
        {"method", static_cast<int>(result.method)},
        {"value", result.value},
        {"optimum_count", result.optimum_count},
        {"functions_scanned", result.functions_scanned},
        {"elapsed_seconds", result.elapsed_seconds},
        {"witness", {{"encoding", result.witness.encoding}, {"decodings", result.witness.decodings}}},
    };
    if (!verbose) {
        return rep;
    }
    std::ostringstream os;
    banner(os);
    double per = result.functions_scanned ? result.elapsed_seconds / static_cast<double>(result.functions_scanned) : 0;
    os << "Search method: " << static_cast<int>(result.method) << "\n";
    os << "Total time of computation: " << format("%.6g", result.elapsed_seconds) << " s\n";
    os << "Total number of " << (result.method == SearchMethod::Combined ? "encoding/decoding functions"
                                 : result.method == SearchMethod::Encodings ? "encoding functions"
                                                                            : "decoding function tuples")
       << ": " << result.functions_scanned << "\n";
    os << "Average time per function: " << format("%.3g", per) << " s\n\n";
    os << "----------- Analysis of the optimal realization ----------\n\n";
    os << "Computation of the classical value for the " << scenario_label(p) << " RAC:\n";
    os << format("%.12g", result.value) << "\n";
    os << "Number of functions achieving the computed value: " << result.optimum_count << "\n\n";
    os << "First functions found achieving the computed value\n";
    os << "Encoding:\nE: " << list(result.witness.encoding) << "\n";
    os << "Decoding:\n";
    for (std::size_t y = 0; y < result.witness.decodings.size(); ++y) {
        os << "D_" << y << ": " << list(result.witness.decodings[y]) << "\n";
    }
    os << "\n" << kEnd << "\n";
    rep.text = os.str();
    return rep;
}

Report render_seesaw_report(const BiasTensor &t, const SeesawConfig &cfg, const SeesawOutcome &outcome,
                            const MeasurementAnalysis &analysis, bool verbose) {
    const auto &p = t.params();
    const auto seeds = static_cast<double>(outcome.per_seed.size());
    double avg_time = 0.0;
    double avg_iter = 0.0;
    bool hit_limit = false;
    nlohmann::json per_seed = nlohmann::json::array();
    for (const auto &s : outcome.per_seed) {
        avg_time += s.elapsed_seconds / seeds;
        avg_iter += s.iterations / seeds;
        hit_limit = hit_limit || !(s.converged_value && s.converged_meas);
        per_seed.push_back({{"value", s.value},
                            {"iterations", s.iterations},
                            {"converged_value", s.converged_value},
                            {"converged_meas", s.converged_meas},
                            {"no_convergence", s.no_convergence},
                            {"elapsed_seconds", s.elapsed_seconds}});
    }
    nlohmann::json mub = nlohmann::json::array();
    for (const auto &e : analysis.mub) {
        mub.push_back({{"pair", {e.first, e.second}},
                       {"verdict", std::string(mub_verdict_name(e.verdict))},
                       {"defect", e.defect}});
    }
    Report rep;
    rep.record = {
        {"schema", "rac-forge/1"},
        {"kind", "seesaw"},
        {"n", p.n},
        {"m", p.m},
        {"d", p.d},
        {"diagonal", cfg.diagonal},
        {"rng_seed", cfg.rng_seed},
        {"value", outcome.best_value},
        {"best_seed", outcome.best_seed},
        {"seeds", cfg.seeds},
        {"seeds_close_to_best", outcome.seeds_close_to_best},
        {"closeness", cfg.closeness},
        {"average_iterations", avg_iter},
        {"average_seed_seconds", avg_time},
        {"elapsed_seconds", outcome.elapsed_seconds},
        {"max_iterations_reached", hit_limit},
        {"ranks", analysis.ranks},
        {"projective", analysis.projective},
        {"projectiveness_defect", analysis.projectiveness_defect},
        {"mub", mub},
        {"per_seed", per_seed},
    };
    if (!verbose) {
        return rep;
    }
    std::ostringstream os;
    banner(os);
    os << "Number of random seeds: " << outcome.per_seed.size() << "\n";
    os << "Average time for each seed: " << format("%.5g", avg_time) << " s\n";
    os << "Average number of iterations: " << format("%.4g", avg_iter) << "\n";
    os << "Seeds " << format("%.0e", cfg.closeness) << " close to the best value: " << outcome.seeds_close_to_best
       << "\n";
    if (hit_limit) {
        os << "Warning: maximum number of iterations reached for at least one seed\n";
    }
    os << "\n----- Analysis of the optimal realization for seed #" << outcome.best_seed + 1 << " ----\n\n";
    os << "Estimation of the " << (cfg.diagonal ? "classical" : "quantum") << " value for the "
       << scenario_label(p) << " RAC:\n";
    os << format("%.12f", outcome.best_value) << "\n\n";
    os << "Measurement operator ranks\n";
    for (std::size_t y = 0; y < analysis.ranks.size(); ++y) {
        os << "M[" << y << "] ranks:";
        for (int r : analysis.ranks[y]) {
            os << "  " << r;
        }
        os << "\n";
    }
    os << "\nMeasurement operator projectiveness\n";
    for (std::size_t y = 0; y < analysis.projective.size(); ++y) {
        for (std::size_t b = 0; b < analysis.projective[y].size(); ++b) {
            os << "M[" << y << ", " << b << "]:  " << (analysis.projective[y][b] ? "Projective" : "Not projective")
               << "\t\t" << format("%.2e", analysis.projectiveness_defect[y][b]) << "\n";
        }
    }
    bool any_mub = std::any_of(analysis.mub.begin(), analysis.mub.end(),
                               [](const MubEntry &e) { return e.verdict != MubVerdict::NotApplicable; });
    if (any_mub) {
        os << "\nMutual unbiasedness of measurements\n";
        for (const auto &e : analysis.mub) {
            if (e.verdict == MubVerdict::NotApplicable) {
                continue;
            }
            os << "M[" << e.first << "] and M[" << e.second << "]:  " << mub_verdict_name(e.verdict) << "\t\t"
               << format("%.2e", e.defect) << "\n";
        }
    }
    os << "\n" << kEnd << "\n";
    rep.text = os.str();
    return rep;
}

}  // namespace racforge
