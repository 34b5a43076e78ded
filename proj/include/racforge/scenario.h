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

#ifndef RACFORGE_SCENARIO_H
#define RACFORGE_SCENARIO_H

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace racforge {

/// Tolerance used when ingesting tensors and weight vectors.
inline constexpr double kNormalizationTol = 1e-12;

/// An n^m --d--> 1 scenario: Alice holds n characters over an alphabet of
/// size m and sends one message of dimension d.
///
/// Strings x are encoded as integers in [0, m^n) with x_0 as the most
/// significant base-m digit, so ascending integers are ascending strings.
struct ScenarioParams {
    int n = 2;
    int m = 2;
    int d = 2;

    /// Throws Error(InvalidScenario) unless n, m, d >= 2 and m^n fits.
    void validate() const;

    std::size_t num_strings() const;
    int character(std::size_t x, int y) const;
    std::size_t with_character(std::size_t x, int y, int value) const;
    /// All characters complemented (c -> m-1-c). For m = 2 this is the flip pair partner.
    std::size_t complement(std::size_t x) const;
    std::string string_label(std::size_t x) const;
    std::optional<std::size_t> parse_string(std::string_view label) const;

    bool operator==(const ScenarioParams &) const = default;
};

enum class TensorKind { General, Rac };

/// Normalized nonnegative weights alpha_{x,y,b}. Immutable after construction.
class BiasTensor {
   public:
    /// `entries` is laid out as ((x * n) + y) * m + b. Rejects negative weights
    /// and sums off 1 by more than kNormalizationTol, unless `renormalize`.
    static BiasTensor from_entries(const ScenarioParams &params, std::vector<double> entries, bool renormalize = false);
    /// Builds a RAC-kind tensor from alpha_{x,y} (layout x * n + y), placing
    /// each weight on b = x_y.
    static BiasTensor from_rac_weights(
        const ScenarioParams &params, std::span<const double> alpha_xy, bool renormalize = false);

    const ScenarioParams &params() const {
        return params_;
    }
    TensorKind kind() const {
        return kind_;
    }
    double operator()(std::size_t x, int y, int b) const {
        return entries_[(x * params_.n + y) * params_.m + b];
    }
    /// alpha_{x,y} = sum_b alpha_{x,y,b}.
    double weight_xy(std::size_t x, int y) const;
    std::span<const double> entries() const {
        return entries_;
    }

   private:
    BiasTensor(ScenarioParams params, std::vector<double> entries);

    ScenarioParams params_;
    TensorKind kind_ = TensorKind::General;
    std::vector<double> entries_;
};

enum class BiasFamily { YOne, YAll, XOne, XDiag, XChess, XPlane, BOne, BAll, Custom };

std::string_view family_name(BiasFamily family);
/// Accepts the canonical upper-case names ("X_ONE", ...). Throws ParseError.
BiasFamily parse_family(std::string_view name);
bool is_string_family(BiasFamily family);

struct BiasSpec {
    BiasFamily family = BiasFamily::YAll;
    /// One entry for scalar families, n entries for Y_ALL, m for B_ALL.
    std::vector<double> weights;
    /// Question distribution r_y combined with a string family as a product.
    std::optional<std::vector<double>> y_weights;
    std::optional<BiasTensor> custom;
};

BiasTensor unbiased_tensor(const ScenarioParams &params);
/// alpha_x for the string families (X_ONE, X_DIAG, X_CHESS, X_PLANE).
std::vector<double> string_distribution(const ScenarioParams &params, BiasFamily family, double w);
/// RAC-kind tensor alpha_{x,y} = alpha_x * r_y.
BiasTensor product_tensor(const ScenarioParams &params, std::span<const double> alpha_x, std::span<const double> r_y);
BiasTensor generate_bias(const ScenarioParams &params, const BiasSpec &spec);

struct MarginalViews {
    std::vector<double> alpha_x;
    std::vector<double> r_y;
    /// r_{y|x}, indexed x * n + y; empty where alpha_x = 0.
    std::vector<std::optional<double>> r_y_given_x;
    /// alpha_{x|y}, indexed x * n + y; empty where r_y = 0.
    std::vector<std::optional<double>> alpha_x_given_y;
    /// alpha_x + alpha_{complement(x)}; only present for m = 2.
    std::optional<std::vector<double>> p_x;
};

MarginalViews marginals(const BiasTensor &t);

struct Factorization {
    bool factorizable = false;
    double max_defect = 0.0;
    std::vector<double> alpha_x;
    std::vector<double> r_y;
};

/// True iff max_{x,y} |alpha_{xy} - alpha_x r_y| <= tol.
Factorization is_factorizable(const BiasTensor &t, double tol = 1e-12);

/// Uniform draw from the simplex over all (x, y) pairs, RAC kind.
BiasTensor random_rac_tensor(const ScenarioParams &params, std::mt19937_64 &rng);
/// Independent uniform simplex draws for alpha_x and r_y.
BiasTensor random_factorizable_tensor(const ScenarioParams &params, std::mt19937_64 &rng);

}  // namespace racforge

#endif
