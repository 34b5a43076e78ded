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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "racforge/classical_search.h"
#include "racforge/error.h"
#include "racforge/seesaw.h"

namespace racforge {
namespace {

const double kQrac = 0.5 + 1.0 / (2.0 * std::sqrt(2.0));

Matrix proj(double theta) {
    // Projector onto cos(theta/2)|0> + sin(theta/2)|1> (Bloch angle theta in the x-z plane).
    Vector v(2);
    v << std::cos(theta / 2), std::sin(theta / 2);
    return v * v.adjoint();
}

Povm bloch_measurement(double theta) {
    return Povm{{proj(theta), proj(theta + M_PI)}};
}

Povm computational() {
    return bloch_measurement(0.0);
}

std::vector<Povm> z_and_x() {
    return {bloch_measurement(0.0), bloch_measurement(M_PI / 2)};
}

TEST(FunctionalValue, MubRealization) {
    auto t = unbiased_tensor({2, 2, 2});
    auto meas = z_and_x();
    std::vector<Vector> states;
    // x = x0 x1 maps to the Bloch direction between (-1)^x0 z and (-1)^x1 x.
    for (double theta : {M_PI / 4, -M_PI / 4, 3 * M_PI / 4, -3 * M_PI / 4}) {
        Vector v(2);
        v << std::cos(theta / 2), std::sin(theta / 2);
        states.push_back(v);
    }
    EXPECT_NEAR(functional_value(t, {states, meas}), kQrac, 1e-15);
}

TEST(FunctionalValue, ConstantMeasurement) {
    std::mt19937_64 rng(5);
    auto t = random_rac_tensor({2, 3, 3}, rng);
    Povm trivial{{Matrix::Identity(3, 3), Matrix::Zero(3, 3), Matrix::Zero(3, 3)}};
    std::vector<Vector> states;
    for (int x = 0; x < 9; ++x) {
        states.push_back(haar_state(3, rng));
    }
    double expected = 0.0;
    for (std::size_t x = 0; x < 9; ++x) {
        for (int y = 0; y < 2; ++y) {
            expected += t(x, y, 0);
        }
    }
    EXPECT_NEAR(functional_value(t, {states, {trivial, trivial}}), expected, 1e-15);
}

TEST(FunctionalValue, BasisStatesInComputationalBasis) {
    auto t = unbiased_tensor({2, 2, 2});
    Vector zero = Vector::Zero(2);
    zero(0) = 1.0;
    EXPECT_NEAR(functional_value(t, {std::vector<Vector>(4, zero), {computational(), computational()}}), 0.5, 1e-15);
    // Both decoders always answer 0, which is right exactly when x_y = 0.
    EXPECT_THROW(functional_value(t, {std::vector<Vector>(3, zero), {computational(), computational()}}), Error);
}

TEST(OptimalStates, ComputationalMeasurements) {
    auto t = unbiased_tensor({2, 2, 2});
    auto states = optimal_states_for(t, {computational(), computational()});
    EXPECT_NEAR(functional_value(t, {states, {computational(), computational()}}), 0.75, 1e-15);
    for (const auto &s : states) {
        EXPECT_NEAR(std::max(std::abs(s(0)), std::abs(s(1))), 1.0, 1e-12);
    }
}

TEST(OptimalStates, SingleQuestion) {
    auto t = generate_bias({2, 2, 2}, {BiasFamily::YOne, {1.0}, {}, {}});
    auto meas = std::vector<Povm>{computational(), bloch_measurement(1.0)};
    auto states = optimal_states_for(t, meas);
    EXPECT_NEAR(functional_value(t, {states, meas}), 1.0, 1e-14);
}

TEST(OptimalStates, MubGivesDiagonalStates) {
    auto t = unbiased_tensor({2, 2, 2});
    auto meas = z_and_x();
    auto states = optimal_states_for(t, meas);
    EXPECT_NEAR(functional_value(t, {states, meas}), kQrac, 1e-14);
    // Bloch z and x components are +-1/sqrt(2).
    for (std::size_t x = 0; x < 4; ++x) {
        Matrix rho = states[x] * states[x].adjoint();
        double z = (rho(0, 0) - rho(1, 1)).real();
        double xc = 2.0 * rho(0, 1).real();
        EXPECT_NEAR(std::abs(z), 1.0 / std::sqrt(2.0), 1e-12);
        EXPECT_NEAR(std::abs(xc), 1.0 / std::sqrt(2.0), 1e-12);
    }
}

TEST(OptimalMeasurements, BasisStates) {
    auto t = unbiased_tensor({2, 2, 2});
    std::vector<Vector> states;
    for (int x = 0; x < 4; ++x) {
        Vector v = Vector::Zero(2);
        v(x >> 1) = 1.0;
        states.push_back(v);
    }
    auto meas = optimal_measurements_for(t, states);
    EXPECT_LE((meas[0].outcomes[0] - computational().outcomes[0]).norm(), 1e-12);
    EXPECT_LE((meas[0].outcomes[1] - computational().outcomes[1]).norm(), 1e-12);
}

TEST(OptimalMeasurements, DiagonalStatesGiveMub) {
    auto t = unbiased_tensor({2, 2, 2});
    auto states = optimal_states_for(t, z_and_x());
    auto meas = optimal_measurements_for(t, states);
    EXPECT_NEAR(functional_value(t, {states, meas}), kQrac, 1e-14);
    for (const auto &m : meas) {
        for (const auto &op : m.outcomes) {
            EXPECT_LE((op * op - op).norm(), 1e-12);
        }
    }
    double overlap = (meas[0].outcomes[0] * meas[1].outcomes[0]).trace().real();
    EXPECT_NEAR(overlap, 0.5, 1e-12);
}

TEST(PerformSeesaw, UnbiasedQubit) {
    auto t = unbiased_tensor({2, 2, 2});
    SeesawConfig cfg;
    cfg.seeds = 5;
    auto out = perform_seesaw(t, cfg);
    EXPECT_NEAR(out.best_value, 0.853553390593, 1e-9);
    EXPECT_EQ(out.seeds_close_to_best, 5);
    ASSERT_EQ(out.per_seed.size(), 5U);
    for (const auto &s : out.per_seed) {
        EXPECT_TRUE(s.converged_value && s.converged_meas);
        EXPECT_LE(s.max_decrease, 1e-10);
    }
    EXPECT_NEAR(functional_value(t, out.best_realization), out.best_value, 1e-12);
}

TEST(PerformSeesaw, DiagonalUnbiased) {
    SeesawConfig cfg;
    cfg.seeds = 5;
    cfg.diagonal = true;
    EXPECT_NEAR(perform_seesaw(unbiased_tensor({2, 2, 2}), cfg).best_value, 0.75, 1e-9);
}

TEST(PerformSeesaw, ThreeBits) {
    SeesawConfig cfg;
    cfg.seeds = 5;
    EXPECT_NEAR(perform_seesaw(unbiased_tensor({3, 2, 2}), cfg).best_value, 0.5 * (1 + 1 / std::sqrt(3.0)), 1e-9);
}

TEST(PerformSeesaw, QuantumDominatesClassicalAndDiagonalDoesNot) {
    std::mt19937_64 rng(13);
    for (auto p : {ScenarioParams{2, 2, 2}, ScenarioParams{2, 3, 3}, ScenarioParams{3, 2, 2}}) {
        for (int rep = 0; rep < 3; ++rep) {
            auto t = random_rac_tensor(p, rng);
            double classical = perform_search(t).value;
            SeesawConfig cfg;
            cfg.seeds = 4;
            cfg.rng_seed = static_cast<std::uint64_t>(rep);
            auto q = perform_seesaw(t, cfg);
            EXPECT_GE(q.best_value, classical - 1e-9);
            for (const auto &s : q.per_seed) {
                EXPECT_LE(s.max_decrease, 1e-10);
            }
            cfg.diagonal = true;
            EXPECT_LE(perform_seesaw(t, cfg).best_value, classical + 1e-9);
        }
    }
}

TEST(PerformSeesaw, DeterministicAcrossThreadCounts) {
    std::mt19937_64 rng(19);
    auto t = random_rac_tensor({2, 3, 3}, rng);
    SeesawConfig cfg;
    cfg.seeds = 4;
    cfg.rng_seed = 77;
    auto a = perform_seesaw(t, cfg);
    cfg.threads = 3;
    auto b = perform_seesaw(t, cfg);
    EXPECT_EQ(a.best_value, b.best_value);
    EXPECT_EQ(a.best_seed, b.best_seed);
    for (std::size_t i = 0; i < a.per_seed.size(); ++i) {
        EXPECT_EQ(a.per_seed[i].value, b.per_seed[i].value);
        EXPECT_EQ(a.per_seed[i].iterations, b.per_seed[i].iterations);
    }
}

TEST(PerformSeesaw, SeedMeasurementsAreIndependentOfOrder) {
    ScenarioParams p{2, 2, 2};
    auto a = seed_measurements(p, 5, 3, false);
    auto b = seed_measurements(p, 5, 3, false);
    auto c = seed_measurements(p, 5, 4, false);
    EXPECT_EQ((a[0].outcomes[0] - b[0].outcomes[0]).norm(), 0.0);
    EXPECT_GT((a[0].outcomes[0] - c[0].outcomes[0]).norm(), 0.0);
}

TEST(SeesawConfig, Validation) {
    SeesawConfig cfg;
    cfg.seeds = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg.seeds = 1;
    cfg.prob_bound = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg.prob_bound = 1e-9;
    EXPECT_NO_THROW(cfg.validate());
}

}  // namespace
}  // namespace racforge
