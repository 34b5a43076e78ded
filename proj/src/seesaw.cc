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

#include "racforge/seesaw.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "racforge/error.h"

namespace racforge {

namespace {

// sum_{y,b} alpha_{xyb} M_y^b
Matrix preparation_operator(const BiasTensor &t, const std::vector<Povm> &measurements, std::size_t x) {
    const auto &p = t.params();
    Matrix op = Matrix::Zero(p.d, p.d);
    for (int y = 0; y < p.n; ++y) {
        for (int b = 0; b < p.m; ++b) {
            double a = t(x, y, b);
            if (a != 0.0) {
                op += a * measurements[static_cast<std::size_t>(y)].outcomes[static_cast<std::size_t>(b)];
            }
        }
    }
    return op;
}

void check_shapes(const ScenarioParams &p, const std::vector<Povm> &measurements) {
    if (measurements.size() != static_cast<std::size_t>(p.n)) {
        throw Error(ErrorCode::ShapeMismatch, "need one measurement per question");
    }
    for (const auto &povm : measurements) {
        if (povm.size() != p.m || povm.dim() != p.d) {
            throw Error(ErrorCode::ShapeMismatch, "measurement must have m outcomes on C^d");
        }
    }
}

SeedResult run_seed(const BiasTensor &t, const SeesawConfig &cfg, int seed_index, QuantumRealization &out) {
    auto started = std::chrono::steady_clock::now();
    SeedResult res;
    auto meas = seed_measurements(t.params(), cfg.rng_seed, seed_index, cfg.diagonal);
    double previous = -std::numeric_limits<double>::infinity();
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        auto states = optimal_states_for(t, meas, cfg.diagonal);
        bool flagged = false;
        auto next = optimal_measurements_for(t, states, cfg.diagonal, &meas, &flagged);
        res.no_convergence = res.no_convergence || flagged;
        double change = 0.0;
        for (std::size_t y = 0; y < next.size(); ++y) {
            for (std::size_t b = 0; b < next[y].outcomes.size(); ++b) {
                change = std::max(change, (next[y].outcomes[b] - meas[y].outcomes[b]).norm());
            }
        }
        out = {std::move(states), std::move(next)};
        meas = out.measurements;
        double value = functional_value(t, out);
        res.trace.push_back(value);
        res.max_decrease = std::max(res.max_decrease, previous - value);
        res.iterations = it;
        res.converged_value = std::abs(value - previous) < cfg.prob_bound;
        res.converged_meas = change < cfg.meas_bound;
        previous = value;
        res.value = value;
        if (res.converged_value && res.converged_meas) {
            break;
        }
    }
    res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return res;
}

}  // namespace

void SeesawConfig::validate() const {
    if (seeds < 1 || max_iterations < 1) {
        throw Error(ErrorCode::InvalidWeight, "seeds and max_iterations must be at least 1");
    }
    if (!(prob_bound > 0.0) || !(meas_bound > 0.0) || !(closeness > 0.0)) {
        throw Error(ErrorCode::InvalidWeight, "see-saw tolerances must be positive");
    }
}

double functional_value(const BiasTensor &t, const QuantumRealization &r) {
    const auto &p = t.params();
    check_shapes(p, r.measurements);
    if (r.preparations.size() != p.num_strings()) {
        throw Error(ErrorCode::ShapeMismatch, "need one preparation per string");
    }
    double total = 0.0;
    for (std::size_t x = 0; x < p.num_strings(); ++x) {
        const auto &psi = r.preparations[x];
        if (psi.size() != p.d) {
            throw Error(ErrorCode::ShapeMismatch, "preparation dimension differs from d");
        }
        total += psi.dot(preparation_operator(t, r.measurements, x) * psi).real();
    }
    return total;
}

std::vector<Vector> optimal_states_for(const BiasTensor &t, const std::vector<Povm> &measurements, bool diagonal) {
    const auto &p = t.params();
    check_shapes(p, measurements);
    std::vector<Vector> out;
    out.reserve(p.num_strings());
    for (std::size_t x = 0; x < p.num_strings(); ++x) {
        Matrix op = preparation_operator(t, measurements, x);
        if (diagonal) {
            Eigen::Index best = 0;
            op.diagonal().real().maxCoeff(&best);
            out.push_back(Vector::Unit(p.d, best));
        } else {
            out.push_back(top_eigenvector(op).vector);
        }
    }
    return out;
}

std::vector<Povm> optimal_measurements_for(const BiasTensor &t, const std::vector<Vector> &preparations,
                                           bool diagonal, const std::vector<Povm> *previous, bool *flagged) {
    const auto &p = t.params();
    if (preparations.size() != p.num_strings()) {
        throw Error(ErrorCode::ShapeMismatch, "need one preparation per string");
    }
    std::vector<Matrix> projectors;
    for (const auto &psi : preparations) {
        projectors.push_back(psi * psi.adjoint());
    }
    std::vector<Povm> out;
    for (int y = 0; y < p.n; ++y) {
        std::vector<Matrix> states(static_cast<std::size_t>(p.m), Matrix::Zero(p.d, p.d));
        for (std::size_t x = 0; x < p.num_strings(); ++x) {
            for (int b = 0; b < p.m; ++b) {
                double a = t(x, y, b);
                if (a != 0.0) {
                    states[static_cast<std::size_t>(b)] += a * projectors[x];
                }
            }
        }
        if (diagonal) {
            Povm povm;
            povm.outcomes.assign(static_cast<std::size_t>(p.m), Matrix::Zero(p.d, p.d));
            for (int i = 0; i < p.d; ++i) {
                int winner = 0;
                for (int b = 1; b < p.m; ++b) {
                    if (states[static_cast<std::size_t>(b)](i, i).real() >
                        states[static_cast<std::size_t>(winner)](i, i).real()) {
                        winner = b;
                    }
                }
                povm.outcomes[static_cast<std::size_t>(winner)](i, i) = 1.0;
            }
            out.push_back(std::move(povm));
            continue;
        }
        DiscriminationOptions options;
        if (previous && previous->size() == static_cast<std::size_t>(p.n)) {
            options.warm_start = &(*previous)[static_cast<std::size_t>(y)];
        }
        auto sol = discriminate(states, options);
        if (flagged && sol.no_convergence) {
            *flagged = true;
        }
        out.push_back(std::move(sol.povm));
    }
    return out;
}

std::vector<Povm> seed_measurements(const ScenarioParams &params, std::uint64_t rng_seed, int seed_index,
                                    bool diagonal) {
    std::seed_seq seq{static_cast<std::uint32_t>(rng_seed), static_cast<std::uint32_t>(rng_seed >> 32),
                      static_cast<std::uint32_t>(seed_index)};
    std::mt19937_64 rng(seq);
    // Full-rank starts: projective ones rarely leave the incompatible-basis
    // fixed point when dropping a question is optimal.
    return random_realization(params, rng(), diagonal, false);
}

SeesawOutcome perform_seesaw(const BiasTensor &t, const SeesawConfig &cfg) {
    cfg.validate();
    auto started = std::chrono::steady_clock::now();
    const auto seeds = static_cast<std::size_t>(cfg.seeds);
    std::vector<SeedResult> results(seeds);
    std::vector<QuantumRealization> realizations(seeds);
    auto workers = static_cast<std::size_t>(std::clamp(cfg.threads, 1, cfg.seeds));
    if (workers == 1) {
        for (std::size_t s = 0; s < seeds; ++s) {
            results[s] = run_seed(t, cfg, static_cast<int>(s), realizations[s]);
        }
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t s = w; s < seeds; s += workers) {
                    results[s] = run_seed(t, cfg, static_cast<int>(s), realizations[s]);
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    SeesawOutcome out;
    out.best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < seeds; ++s) {
        if (results[s].value > out.best_value) {
            out.best_value = results[s].value;
            out.best_seed = static_cast<int>(s);
        }
    }
    for (const auto &r : results) {
        if (out.best_value - r.value <= cfg.closeness) {
            ++out.seeds_close_to_best;
        }
    }
    out.best_realization = std::move(realizations[static_cast<std::size_t>(out.best_seed)]);
    out.per_seed = std::move(results);
    out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

}  // namespace racforge
