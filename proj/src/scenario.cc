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

#include "racforge/scenario.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "racforge/error.h"

namespace racforge {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidScenario:
            return "InvalidScenario";
        case ErrorCode::InvalidWeight:
            return "InvalidWeight";
        case ErrorCode::WrongWeightArity:
            return "WrongWeightArity";
        case ErrorCode::UnnormalizedCustom:
            return "UnnormalizedCustom";
        case ErrorCode::ShapeMismatch:
            return "ShapeMismatch";
        case ErrorCode::SearchTooLarge:
            return "SearchTooLarge";
        case ErrorCode::WrongOutcomeCount:
            return "WrongOutcomeCount";
        case ErrorCode::NoConvergence:
            return "NoConvergence";
        case ErrorCode::NotProjective:
            return "NotProjective";
        case ErrorCode::DivisionByZero:
            return "DivisionByZero";
        case ErrorCode::OutOfTheoryScope:
            return "OutOfTheoryScope";
        case ErrorCode::ParseError:
            return "ParseError";
    }
    return "Unknown";
}

namespace {

constexpr std::string_view kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";

std::size_t checked_pow(std::size_t base, int exponent) {
    std::size_t out = 1;
    for (int i = 0; i < exponent; ++i) {
        if (out > std::numeric_limits<std::size_t>::max() / base) {
            throw Error(ErrorCode::InvalidScenario, "string space m^n does not fit in 64 bits");
        }
        out *= base;
    }
    return out;
}

void check_unit_interval(double w) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw Error(ErrorCode::InvalidWeight, "weight " + std::to_string(w) + " outside [0, 1]");
    }
}

void check_distribution(std::span<const double> v, std::string_view what) {
    double total = 0.0;
    for (double w : v) {
        if (!(w >= 0.0)) {
            throw Error(ErrorCode::InvalidWeight, std::string(what) + " has a negative entry");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
        throw Error(ErrorCode::InvalidWeight, std::string(what) + " sums to " + std::to_string(total) + ", not 1");
    }
}

std::vector<double> uniform_simplex(std::size_t size, std::mt19937_64 &rng) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> out(size);
    for (auto &v : out) {
        v = expo(rng);
    }
    double total = std::accumulate(out.begin(), out.end(), 0.0);
    for (auto &v : out) {
        v /= total;
    }
    return out;
}

}  // namespace

void ScenarioParams::validate() const {
    if (n < 2 || m < 2 || d < 2) {
        throw Error(ErrorCode::InvalidScenario, "n, m and d must all be at least 2");
    }
    if (m > static_cast<int>(kDigits.size())) {
        throw Error(ErrorCode::InvalidScenario, "alphabet sizes above 36 are not supported");
    }
    (void)checked_pow(static_cast<std::size_t>(m), n);
}

std::size_t ScenarioParams::num_strings() const {
    return checked_pow(static_cast<std::size_t>(m), n);
}

int ScenarioParams::character(std::size_t x, int y) const {
    for (int k = n - 1; k > y; --k) {
        x /= static_cast<std::size_t>(m);
    }
    return static_cast<int>(x % static_cast<std::size_t>(m));
}

std::size_t ScenarioParams::with_character(std::size_t x, int y, int value) const {
    std::size_t place = 1;
    for (int k = n - 1; k > y; --k) {
        place *= static_cast<std::size_t>(m);
    }
    int current = character(x, y);
    return x - static_cast<std::size_t>(current) * place + static_cast<std::size_t>(value) * place;
}

std::size_t ScenarioParams::complement(std::size_t x) const {
    return num_strings() - 1 - x;
}

std::string ScenarioParams::string_label(std::size_t x) const {
    std::string out(static_cast<std::size_t>(n), '0');
    for (int k = n - 1; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = kDigits[x % static_cast<std::size_t>(m)];
        x /= static_cast<std::size_t>(m);
    }
    return out;
}

std::optional<std::size_t> ScenarioParams::parse_string(std::string_view label) const {
    if (label.size() != static_cast<std::size_t>(n)) {
        return std::nullopt;
    }
    std::size_t x = 0;
    for (char c : label) {
        auto pos = kDigits.find(c);
        if (pos == std::string_view::npos || pos >= static_cast<std::size_t>(m)) {
            return std::nullopt;
        }
        x = x * static_cast<std::size_t>(m) + pos;
    }
    return x;
}

BiasTensor::BiasTensor(ScenarioParams params, std::vector<double> entries)
    : params_(params), entries_(std::move(entries)) {
    kind_ = TensorKind::Rac;
    std::size_t strings = params_.num_strings();
    for (std::size_t x = 0; x < strings && kind_ == TensorKind::Rac; ++x) {
        for (int y = 0; y < params_.n; ++y) {
            int xy = params_.character(x, y);
            for (int b = 0; b < params_.m; ++b) {
                if (b != xy && (*this)(x, y, b) != 0.0) {
                    kind_ = TensorKind::General;
                }
            }
        }
    }
}

BiasTensor BiasTensor::from_entries(const ScenarioParams &params, std::vector<double> entries, bool renormalize) {
    params.validate();
    std::size_t expected = params.num_strings() * static_cast<std::size_t>(params.n * params.m);
    if (entries.size() != expected) {
        throw Error(ErrorCode::ShapeMismatch, "tensor has " + std::to_string(entries.size()) + " entries, expected " +
                                                  std::to_string(expected));
    }
    double total = 0.0;
    for (double w : entries) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::InvalidWeight, "bias weights must be finite and nonnegative");
        }
        total += w;
    }
    if (renormalize) {
        if (total <= 0.0) {
            throw Error(ErrorCode::UnnormalizedCustom, "cannot renormalize an all-zero tensor");
        }
        for (auto &w : entries) {
            w /= total;
        }
    } else if (std::abs(total - 1.0) > kNormalizationTol) {
        throw Error(ErrorCode::UnnormalizedCustom, "tensor sums to " + std::to_string(total) + ", not 1");
    }
    return BiasTensor(params, std::move(entries));
}

BiasTensor BiasTensor::from_rac_weights(
    const ScenarioParams &params, std::span<const double> alpha_xy, bool renormalize) {
    params.validate();
    std::size_t strings = params.num_strings();
    if (alpha_xy.size() != strings * static_cast<std::size_t>(params.n)) {
        throw Error(ErrorCode::ShapeMismatch, "alpha_xy must have m^n * n entries");
    }
    std::vector<double> entries(strings * static_cast<std::size_t>(params.n * params.m), 0.0);
    for (std::size_t x = 0; x < strings; ++x) {
        for (int y = 0; y < params.n; ++y) {
            entries[(x * params.n + y) * params.m + params.character(x, y)] = alpha_xy[x * params.n + y];
        }
    }
    return from_entries(params, std::move(entries), renormalize);
}

double BiasTensor::weight_xy(std::size_t x, int y) const {
    if (kind_ == TensorKind::Rac) {
        return (*this)(x, y, params_.character(x, y));
    }
    double total = 0.0;
    for (int b = 0; b < params_.m; ++b) {
        total += (*this)(x, y, b);
    }
    return total;
}

std::string_view family_name(BiasFamily family) {
    switch (family) {
        case BiasFamily::YOne:
            return "Y_ONE";
        case BiasFamily::YAll:
            return "Y_ALL";
        case BiasFamily::XOne:
            return "X_ONE";
        case BiasFamily::XDiag:
            return "X_DIAG";
        case BiasFamily::XChess:
            return "X_CHESS";
        case BiasFamily::XPlane:
            return "X_PLANE";
        case BiasFamily::BOne:
            return "B_ONE";
        case BiasFamily::BAll:
            return "B_ALL";
        case BiasFamily::Custom:
            return "CUSTOM";
    }
    return "?";
}

BiasFamily parse_family(std::string_view name) {
    for (auto f : {BiasFamily::YOne, BiasFamily::YAll, BiasFamily::XOne, BiasFamily::XDiag, BiasFamily::XChess,
                   BiasFamily::XPlane, BiasFamily::BOne, BiasFamily::BAll, BiasFamily::Custom}) {
        if (family_name(f) == name) {
            return f;
        }
    }
    throw Error(ErrorCode::ParseError, "unknown bias family '" + std::string(name) + "'");
}

bool is_string_family(BiasFamily family) {
    return family == BiasFamily::XOne || family == BiasFamily::XDiag || family == BiasFamily::XChess ||
           family == BiasFamily::XPlane;
}

BiasTensor unbiased_tensor(const ScenarioParams &params) {
    params.validate();
    std::size_t strings = params.num_strings();
    std::vector<double> alpha(strings * static_cast<std::size_t>(params.n),
                              (1.0 / params.n) / static_cast<double>(strings));
    return BiasTensor::from_rac_weights(params, alpha);
}

std::vector<double> string_distribution(const ScenarioParams &params, BiasFamily family, double w) {
    params.validate();
    check_unit_interval(w);
    std::size_t strings = params.num_strings();
    auto total = static_cast<double>(strings);
    std::vector<double> alpha(strings);
    switch (family) {
        case BiasFamily::XOne:
            for (std::size_t x = 0; x < strings; ++x) {
                alpha[x] = x == 0 ? w : (1.0 - w) / (total - 1.0);
            }
            break;
        case BiasFamily::XDiag: {
            for (std::size_t x = 0; x < strings; ++x) {
                bool diagonal = true;
                for (int k = 1; k < params.n; ++k) {
                    diagonal = diagonal && params.character(x, k) == params.character(x, 0);
                }
                alpha[x] = diagonal ? w / params.m : (1.0 - w) / (total - params.m);
            }
            break;
        }
        case BiasFamily::XChess: {
            for (std::size_t x = 0; x < strings; ++x) {
                int sum = 0;
                for (int k = 0; k < params.n; ++k) {
                    sum += params.character(x, k);
                }
                bool even = sum % 2 == 0;
                if (params.m % 2 == 0) {
                    alpha[x] = even ? 2.0 * w / total : 2.0 * (1.0 - w) / total;
                } else {
                    alpha[x] = even ? 2.0 * (1.0 - w) / (total + 1.0) : 2.0 * w / (total - 1.0);
                }
            }
            break;
        }
        case BiasFamily::XPlane: {
            double plane = total / params.m;
            for (std::size_t x = 0; x < strings; ++x) {
                alpha[x] = params.character(x, 0) == 0 ? w / plane : (1.0 - w) / (total - plane);
            }
            break;
        }
        default:
            throw Error(ErrorCode::InvalidWeight, std::string(family_name(family)) + " is not a string family");
    }
    return alpha;
}

BiasTensor product_tensor(const ScenarioParams &params, std::span<const double> alpha_x, std::span<const double> r_y) {
    params.validate();
    std::size_t strings = params.num_strings();
    if (alpha_x.size() != strings || r_y.size() != static_cast<std::size_t>(params.n)) {
        throw Error(ErrorCode::WrongWeightArity, "product tensor needs m^n string weights and n question weights");
    }
    std::vector<double> alpha(strings * static_cast<std::size_t>(params.n));
    for (std::size_t x = 0; x < strings; ++x) {
        for (int y = 0; y < params.n; ++y) {
            alpha[x * params.n + y] = alpha_x[x] * r_y[y];
        }
    }
    return BiasTensor::from_rac_weights(params, alpha);
}

BiasTensor generate_bias(const ScenarioParams &params, const BiasSpec &spec) {
    params.validate();
    const auto &w = spec.weights;
    std::size_t strings = params.num_strings();
    auto scalar = [&]() {
        if (w.size() != 1) {
            throw Error(ErrorCode::WrongWeightArity,
                        std::string(family_name(spec.family)) + " takes exactly one scalar weight");
        }
        check_unit_interval(w[0]);
        return w[0];
    };
    if (spec.y_weights && !is_string_family(spec.family)) {
        throw Error(ErrorCode::InvalidWeight, "question weights can only be composed with a string family");
    }

    switch (spec.family) {
        case BiasFamily::Custom: {
            if (!spec.custom) {
                throw Error(ErrorCode::UnnormalizedCustom, "CUSTOM bias requires explicit entries");
            }
            if (!(spec.custom->params() == params)) {
                throw Error(ErrorCode::ShapeMismatch, "custom tensor scenario does not match");
            }
            return *spec.custom;
        }
        case BiasFamily::YOne: {
            double w0 = scalar();
            std::vector<double> r(static_cast<std::size_t>(params.n), (1.0 - w0) / (params.n - 1));
            r[0] = w0;
            std::vector<double> uniform(strings, 1.0 / static_cast<double>(strings));
            return product_tensor(params, uniform, r);
        }
        case BiasFamily::YAll: {
            if (w.size() != static_cast<std::size_t>(params.n)) {
                throw Error(ErrorCode::WrongWeightArity, "Y_ALL needs n weights");
            }
            check_distribution(w, "Y_ALL weights");
            std::vector<double> uniform(strings, 1.0 / static_cast<double>(strings));
            return product_tensor(params, uniform, w);
        }
        case BiasFamily::XOne:
        case BiasFamily::XDiag:
        case BiasFamily::XChess:
        case BiasFamily::XPlane: {
            auto alpha_x = string_distribution(params, spec.family, scalar());
            std::vector<double> r(static_cast<std::size_t>(params.n), 1.0 / params.n);
            if (spec.y_weights) {
                if (spec.y_weights->size() != static_cast<std::size_t>(params.n)) {
                    throw Error(ErrorCode::WrongWeightArity, "question weights need n entries");
                }
                check_distribution(*spec.y_weights, "question weights");
                r = *spec.y_weights;
            }
            return product_tensor(params, alpha_x, r);
        }
        case BiasFamily::BOne:
        case BiasFamily::BAll: {
            std::vector<double> per_char(static_cast<std::size_t>(params.m));
            if (spec.family == BiasFamily::BOne) {
                double w0 = scalar();
                std::fill(per_char.begin(), per_char.end(), (1.0 - w0) / (params.m - 1));
                per_char[0] = w0;
            } else {
                if (w.size() != static_cast<std::size_t>(params.m)) {
                    throw Error(ErrorCode::WrongWeightArity, "B_ALL needs m weights");
                }
                check_distribution(w, "B_ALL weights");
                per_char = w;
            }
            double norm = 1.0 / params.n / static_cast<double>(strings / static_cast<std::size_t>(params.m));
            std::vector<double> alpha(strings * static_cast<std::size_t>(params.n));
            for (std::size_t x = 0; x < strings; ++x) {
                for (int y = 0; y < params.n; ++y) {
                    alpha[x * params.n + y] = norm * per_char[static_cast<std::size_t>(params.character(x, y))];
                }
            }
            return BiasTensor::from_rac_weights(params, alpha);
        }
    }
    throw Error(ErrorCode::InvalidWeight, "unsupported bias family");
}

MarginalViews marginals(const BiasTensor &t) {
    const auto &p = t.params();
    std::size_t strings = p.num_strings();
    MarginalViews out;
    out.alpha_x.assign(strings, 0.0);
    out.r_y.assign(static_cast<std::size_t>(p.n), 0.0);
    for (std::size_t x = 0; x < strings; ++x) {
        for (int y = 0; y < p.n; ++y) {
            double a = t.weight_xy(x, y);
            out.alpha_x[x] += a;
            out.r_y[static_cast<std::size_t>(y)] += a;
        }
    }
    out.r_y_given_x.resize(strings * static_cast<std::size_t>(p.n));
    out.alpha_x_given_y.resize(strings * static_cast<std::size_t>(p.n));
    for (std::size_t x = 0; x < strings; ++x) {
        for (int y = 0; y < p.n; ++y) {
            double a = t.weight_xy(x, y);
            std::size_t idx = x * p.n + y;
            if (out.alpha_x[x] > 0.0) {
                out.r_y_given_x[idx] = a / out.alpha_x[x];
            }
            if (out.r_y[static_cast<std::size_t>(y)] > 0.0) {
                out.alpha_x_given_y[idx] = a / out.r_y[static_cast<std::size_t>(y)];
            }
        }
    }
    if (p.m == 2) {
        std::vector<double> pairs(strings);
        for (std::size_t x = 0; x < strings; ++x) {
            pairs[x] = out.alpha_x[x] + out.alpha_x[p.complement(x)];
        }
        out.p_x = std::move(pairs);
    }
    return out;
}

Factorization is_factorizable(const BiasTensor &t, double tol) {
    auto views = marginals(t);
    const auto &p = t.params();
    Factorization out;
    for (std::size_t x = 0; x < p.num_strings(); ++x) {
        for (int y = 0; y < p.n; ++y) {
            double defect = std::abs(t.weight_xy(x, y) - views.alpha_x[x] * views.r_y[static_cast<std::size_t>(y)]);
            out.max_defect = std::max(out.max_defect, defect);
        }
    }
    out.factorizable = out.max_defect <= tol;
    if (out.factorizable) {
        out.alpha_x = std::move(views.alpha_x);
        out.r_y = std::move(views.r_y);
    }
    return out;
}

BiasTensor random_rac_tensor(const ScenarioParams &params, std::mt19937_64 &rng) {
    params.validate();
    auto alpha = uniform_simplex(params.num_strings() * static_cast<std::size_t>(params.n), rng);
    return BiasTensor::from_rac_weights(params, alpha, true);
}

BiasTensor random_factorizable_tensor(const ScenarioParams &params, std::mt19937_64 &rng) {
    params.validate();
    auto alpha_x = uniform_simplex(params.num_strings(), rng);
    auto r_y = uniform_simplex(static_cast<std::size_t>(params.n), rng);
    return product_tensor(params, alpha_x, r_y);
}

}  // namespace racforge
