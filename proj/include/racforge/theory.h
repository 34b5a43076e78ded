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

#ifndef RACFORGE_THEORY_H
#define RACFORGE_THEORY_H

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "racforge/quantum_core.h"
#include "racforge/scenario.h"

namespace racforge {

enum class ResultKind { Exact, UpperBound, Classical };
enum class Attainment { Attained, NotAttained, Unknown };

std::string_view result_kind_name(ResultKind k);
std::string_view attainment_name(Attainment a);

/// Cosines between measurement Bloch vectors and the matrix G~ built from them.
struct GramConfig {
    Eigen::MatrixXd cosines;
    Eigen::MatrixXd gtilde;
    bool in_range = false;
    bool psd = false;
    double min_eigenvalue = 0.0;
    /// Eigenvalues of G~ above 1e-10.
    int rank = 0;

    bool consistent() const {
        return in_range && psd;
    }
};

struct TheoryResult {
    double value = 0.0;
    ResultKind kind = ResultKind::UpperBound;
    Attainment attained = Attainment::Unknown;
    std::optional<GramConfig> gram;
    /// Bits ignored by the strategy the value refers to.
    std::optional<std::vector<int>> drop_set;
    std::string note;
};

/// m = 2 factorizable data: p over the flip-pair transversal (strings with
/// x_0 = 0, i.e. indices [0, 2^{n-1})) and r_y.
struct FlipPairData {
    int n = 0;
    std::vector<double> p;
    std::vector<double> r;
};

/// Throws OutOfTheoryScope unless m = 2 and the tensor factorizes.
FlipPairData flip_pair_data(const BiasTensor &t);

/// 1/2 + sqrt(2^{n-3}) sqrt(sum p^2) sqrt(sum r^2).
double upper_bound_n2(const std::vector<double> &p, const std::vector<double> &r);

/// Cosines that saturate the Cauchy-Schwarz bound. Throws DivisionByZero when
/// some r_i r_j = 0.
GramConfig cosines_from_bias(const std::vector<double> &p, const std::vector<double> &r);

/// True iff every per-string saturation condition holds for `gram` within tol.
bool string_conditions_hold(const std::vector<double> &p, const std::vector<double> &r, const GramConfig &gram,
                            double tol = 1e-9);

/// Value of 2^2 strategies that use both bits (rank-one qubit measurements).
TheoryResult value_2bit(double p00, double p01, double r0, double r1);

/// Value of 3^2 strategies that use all bits; exact when the saturating
/// cosines are consistent or for the X_ONE pattern p_001 = p_010 = p_011,
/// r_0 >= r_1 = r_2. Otherwise an upper bound.
TheoryResult value_3bit(const std::vector<double> &p, const std::vector<double> &r);

/// f_k: best constant guess for bit k, max_b sum_x alpha_{x,k,b}.
double constant_guess_value(const BiasTensor &t, int k);

using ResidualEvaluator = std::function<double(const BiasTensor &)>;

/// sum_{k in s} f_k + W * residual(reduced tensor over the kept bits), where
/// W is the question weight left on the kept bits. A single kept bit
/// contributes W. Requires m = 2 and a factorizable tensor.
TheoryResult bit_drop_value(const BiasTensor &t, const std::vector<int> &s, const ResidualEvaluator &residual);

/// Tensor over the kept bits (normalized), or nullopt if fewer than two remain.
std::optional<BiasTensor> reduced_tensor(const BiasTensor &t, const std::vector<int> &s);

/// Closed form for X_PLANE with n in {2, 3} and a = alpha_{x_0 = 0}.
TheoryResult x_plane_value(int n, double a);

/// Closed form for B_ONE on 2^2-->1.
TheoryResult b_one_value(double w0);

/// 1/2 + (1/2) sqrt(d^2 - 4 d (d-1) r0 r1) sqrt(sum alpha^2); alpha indexed x0 * d + x1.
double upper_bound_2d(const std::vector<double> &alpha, double r0, double r1);

enum class NecessaryConditions { Pass, Fail, Unknown };
std::string_view necessary_conditions_name(NecessaryConditions v);

struct Attainability2d {
    double c_squared = 0.0;
    /// ranks[y][x_y] implied by the saturation condition.
    std::vector<std::vector<double>> ranks;
    /// Target tr(M_0^{x0} M_1^{x1}), row-major d x d.
    Eigen::MatrixXd b_target;
    bool ranks_feasible = false;
    bool b_feasible = false;
    NecessaryConditions verdict = NecessaryConditions::Unknown;
};

Attainability2d attainability_2d(const std::vector<double> &alpha, double r0, double r1);

/// 2^d-->1 tensor alpha_{x0 x1} r_y tailored to a pair of projective
/// measurements. Throws NotProjective.
BiasTensor bias_from_measurements(const Povm &m0, const Povm &m1, double r0, double r1);

/// Exact classical value for m = d = 2 from drop sets, decoding orientations
/// and weighted-majority encodings.
TheoryResult classical_value_n2(const BiasTensor &t);

/// Best theory statement for a tensor: n^2 with m = d = 2 (n = 2, 3 exact
/// where covered, bound otherwise), B_ONE on 2^2, or the 2^d bound.
/// Throws OutOfTheoryScope.
TheoryResult theory_value(const BiasTensor &t);

}  // namespace racforge

#endif
