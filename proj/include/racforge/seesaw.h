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

#ifndef RACFORGE_SEESAW_H
#define RACFORGE_SEESAW_H

#include <cstdint>
#include <vector>

#include "racforge/quantum_core.h"
#include "racforge/scenario.h"

namespace racforge {

/// Pure preparations |psi_x> and one m-outcome POVM per question y.
struct QuantumRealization {
    std::vector<Vector> preparations;
    std::vector<Povm> measurements;
};

struct SeesawConfig {
    int seeds = 1;
    double prob_bound = 1e-9;
    double meas_bound = 1e-7;
    int max_iterations = 200;
    bool diagonal = false;
    std::uint64_t rng_seed = 0;
    double closeness = 1e-13;
    int threads = 1;

    /// Throws InvalidWeight on nonpositive tolerances or seeds < 1.
    void validate() const;
};

struct SeedResult {
    double value = 0.0;
    int iterations = 0;
    bool converged_value = false;
    bool converged_meas = false;
    /// Some measurement step ended with a certificate gap below -1e-6.
    bool no_convergence = false;
    /// Largest decrease seen between consecutive iterations (0 if monotone).
    double max_decrease = 0.0;
    std::vector<double> trace;
    double elapsed_seconds = 0.0;
};

struct SeesawOutcome {
    double best_value = 0.0;
    int best_seed = 0;
    QuantumRealization best_realization;
    std::vector<SeedResult> per_seed;
    int seeds_close_to_best = 0;
    double elapsed_seconds = 0.0;
};

/// sum_{x,y,b} alpha_{xyb} <psi_x| M_y^b |psi_x>. Throws ShapeMismatch.
double functional_value(const BiasTensor &t, const QuantumRealization &r);

/// Top eigenvector of sum_{y,b} alpha_{xyb} M_y^b for each x. In diagonal mode
/// the best computational basis vector is chosen instead.
std::vector<Vector> optimal_states_for(const BiasTensor &t, const std::vector<Povm> &measurements,
                                       bool diagonal = false);

/// Per question y, the optimal discrimination of rho_{y,b} = sum_x alpha_{xyb} |psi_x><psi_x|.
/// `previous` (optional) warm-starts the projective polish. Sets *flagged when
/// any solve reports no_convergence.
std::vector<Povm> optimal_measurements_for(const BiasTensor &t, const std::vector<Vector> &preparations,
                                           bool diagonal = false, const std::vector<Povm> *previous = nullptr,
                                           bool *flagged = nullptr);

/// Seed-specific initial measurements; seeds are independent of thread count.
std::vector<Povm> seed_measurements(const ScenarioParams &params, std::uint64_t rng_seed, int seed_index,
                                    bool diagonal);

SeesawOutcome perform_seesaw(const BiasTensor &t, const SeesawConfig &cfg);

}  // namespace racforge

#endif
