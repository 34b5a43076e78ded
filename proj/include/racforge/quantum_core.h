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

#ifndef RACFORGE_QUANTUM_CORE_H
#define RACFORGE_QUANTUM_CORE_H

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "racforge/scenario.h"

namespace racforge {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPovmTol = 1e-9;

/// max |A - A^dagger| entrywise.
double hermiticity_defect(const Matrix &a);
Matrix hermitize(const Matrix &a);
/// Throws ShapeMismatch unless `a` is square and Hermitian within kHermitianTol.
void require_hermitian(const Matrix &a);

/// Eigenvalues of a Hermitian matrix in ascending order.
Eigen::VectorXd hermitian_eigenvalues(const Matrix &a);

struct EigenPair {
    double value = 0.0;
    Vector vector;
};

/// Largest eigenvalue and a unit eigenvector; ties resolve to the eigensolver's
/// ordering.
EigenPair top_eigenvector(const Matrix &a);

struct Povm {
    std::vector<Matrix> outcomes;

    int dim() const {
        return outcomes.empty() ? 0 : static_cast<int>(outcomes.front().rows());
    }
    int size() const {
        return static_cast<int>(outcomes.size());
    }
};

/// || sum_b M^b - 1 ||_F
double completeness_defect(const Povm &povm);
/// Smallest eigenvalue over all outcomes.
double min_outcome_eigenvalue(const Povm &povm);
bool is_valid_povm(const Povm &povm, double tol = kPovmTol);

struct Certificate {
    /// min_b lambda_min(Y - rho_b) with Y = (1/2) sum_b (rho_b M^b + M^b rho_b).
    double gap = 0.0;
    double hermiticity_defect = 0.0;
};

Certificate discrimination_certificate(const std::vector<Matrix> &states, const Povm &povm);
double discrimination_value(const std::vector<Matrix> &states, const Povm &povm);

struct DiscriminationSolution {
    Povm povm;
    double value = 0.0;
    double certificate_gap = 0.0;
    double hermiticity_defect = 0.0;
    int iterations = 0;
    /// Set when the solver gave up with certificate_gap below -1e-6.
    bool no_convergence = false;
};

/// Projector onto the nonnegative eigenspace of rho_0 - rho_1 (zero
/// eigenvalues go to outcome 0). Throws WrongOutcomeCount.
DiscriminationSolution helstrom_two_outcome(const std::vector<Matrix> &states);

struct DiscriminationOptions {
    /// Stop once the value increases by less than this per step.
    double tol = 1e-15;
    int max_iter = 20000;
    /// Certificate gap that counts as optimal.
    double certificate_target = 1e-11;
    int restarts = 5;
    std::uint64_t restart_seed = 0x5eed;
    /// Route two-outcome instances through the iteration too (testing aid).
    bool force_iterative = false;
    /// Try a projective polish before iterating from the uniform seed.
    const Povm *warm_start = nullptr;
};

/// Minimum-error discrimination of subnormalized states rho_b.
DiscriminationSolution discriminate(const std::vector<Matrix> &states, const DiscriminationOptions &options = {});

/// Haar-random unitary from the QR of a complex Ginibre matrix.
Matrix haar_unitary(int d, std::mt19937_64 &rng);
Vector haar_state(int d, std::mt19937_64 &rng);

/// Random k-outcome POVM on C^d. Projective (Haar column groups) when
/// `projective` and k <= d, Ginibre-normalized otherwise; diagonal mode draws
/// random per-basis-element outcome distributions.
Povm random_povm(int d, int k, std::mt19937_64 &rng, bool diagonal, bool projective);

/// n random m-outcome POVMs; a pure function of rng_seed.
std::vector<Povm> random_realization(const ScenarioParams &params, std::uint64_t rng_seed, bool diagonal,
                                     bool projective_seed);

}  // namespace racforge

#endif
