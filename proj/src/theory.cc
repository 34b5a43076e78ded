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

#include "racforge/theory.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "racforge/analysis.h"
#include "racforge/error.h"

namespace racforge {

namespace {

constexpr double kPsdTol = 1e-10;
constexpr double kPatternTol = 1e-12;

double sum_squares(const std::vector<double> &v) {
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

int bit(std::size_t x, int y, int n) {
    return static_cast<int>((x >> (n - 1 - y)) & 1U);
}

GramConfig make_gram(Eigen::MatrixXd cosines) {
    GramConfig g;
    const auto n = cosines.rows();
    g.in_range = true;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && std::abs(cosines(i, j)) > 1.0 + 1e-12) {
                g.in_range = false;
            }
        }
    }
    g.gtilde = 0.25 * cosines;
    g.gtilde.diagonal().setConstant(0.25);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.gtilde, Eigen::EigenvaluesOnly);
    g.min_eigenvalue = es.eigenvalues()(0);
    g.psd = g.min_eigenvalue >= -kPsdTol;
    g.rank = static_cast<int>((es.eigenvalues().array() > kPsdTol).count());
    g.cosines = std::move(cosines);
    return g;
}

GramConfig two_bit_gram(double c) {
    Eigen::MatrixXd cosines(2, 2);
    cosines << 1.0, c, c, 1.0;
    return make_gram(cosines);
}

// Sum alpha over strings sharing the kept characters; r stays per question.
struct Reduction {
    double dropped = 0.0;
    double kept_weight = 0.0;
    std::vector<int> kept;
};

Reduction reduce(const BiasTensor &t, const std::vector<int> &s) {
    const auto &p = t.params();
    Reduction red;
    for (int k = 0; k < p.n; ++k) {
        if (std::find(s.begin(), s.end(), k) != s.end()) {
            red.dropped += constant_guess_value(t, k);
        } else {
            red.kept.push_back(k);
        }
    }
    auto views = marginals(t);
    for (int k : red.kept) {
        red.kept_weight += views.r_y[static_cast<std::size_t>(k)];
    }
    return red;
}

void require_factorizable_bits(const BiasTensor &t) {
    const auto &p = t.params();
    if (p.m != 2 || t.kind() != TensorKind::Rac) {
        throw Error(ErrorCode::OutOfTheoryScope, "theory results need binary characters and a RAC tensor");
    }
    if (!is_factorizable(t, 1e-10).factorizable) {
        throw Error(ErrorCode::OutOfTheoryScope, "theory results need a factorizable bias");
    }
}

// Best value of strategies that use every bit, for m = d = 2 factorizable data.
TheoryResult all_bits_value(const FlipPairData &data) {
    if (data.n == 2) {
        return value_2bit(data.p[0], data.p[1], data.r[0], data.r[1]);
    }
    if (data.n == 3) {
        return value_3bit(data.p, data.r);
    }
    TheoryResult out;
    out.value = upper_bound_n2(data.p, data.r);
    out.kind = ResultKind::UpperBound;
    try {
        auto gram = cosines_from_bias(data.p, data.r);
        bool ok = gram.consistent() && gram.rank <= 3 && string_conditions_hold(data.p, data.r, gram);
        out.attained = ok ? Attainment::Attained : Attainment::NotAttained;
        out.note = ok ? "saturating cosines are realizable in three dimensions"
                      : "saturating cosines are not realizable by Bloch vectors";
        out.gram = std::move(gram);
    } catch (const Error &) {
        out.attained = Attainment::Unknown;
        out.note = "some question has zero weight";
    }
    return out;
}

bool matches_b_one(const BiasTensor &t, double &w0) {
    const auto &p = t.params();
    if (p.n != 2 || p.m != 2 || p.d != 2) {
        return false;
    }
    w0 = 4.0 * t(0, 0, 0);
    if (w0 < 0.0 || w0 > 1.0) {
        return false;
    }
    auto ref = generate_bias(p, BiasSpec{BiasFamily::BOne, {w0}, std::nullopt, std::nullopt});
    for (std::size_t i = 0; i < ref.entries().size(); ++i) {
        if (std::abs(ref.entries()[i] - t.entries()[i]) > kPatternTol) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::string_view result_kind_name(ResultKind k) {
    switch (k) {
        case ResultKind::Exact:
            return "exact";
        case ResultKind::UpperBound:
            return "upper_bound";
        case ResultKind::Classical:
            return "classical";
    }
    return "?";
}

std::string_view attainment_name(Attainment a) {
    switch (a) {
        case Attainment::Attained:
            return "attained";
        case Attainment::NotAttained:
            return "not_attained";
        case Attainment::Unknown:
            return "unknown";
    }
    return "?";
}

std::string_view necessary_conditions_name(NecessaryConditions v) {
    switch (v) {
        case NecessaryConditions::Pass:
            return "necessary_conditions_pass";
        case NecessaryConditions::Fail:
            return "fail";
        case NecessaryConditions::Unknown:
            return "unknown";
    }
    return "?";
}

FlipPairData flip_pair_data(const BiasTensor &t) {
    require_factorizable_bits(t);
    const auto &p = t.params();
    auto views = marginals(t);
    FlipPairData out;
    out.n = p.n;
    out.r = views.r_y;
    const std::size_t half = p.num_strings() / 2;
    for (std::size_t x = 0; x < half; ++x) {
        out.p.push_back(views.alpha_x[x] + views.alpha_x[p.complement(x)]);
    }
    return out;
}

double upper_bound_n2(const std::vector<double> &p, const std::vector<double> &r) {
    const double scale = static_cast<double>(p.size()) / 4.0;
    return 0.5 + std::sqrt(scale) * std::sqrt(sum_squares(p)) * std::sqrt(sum_squares(r));
}

GramConfig cosines_from_bias(const std::vector<double> &p, const std::vector<double> &r) {
    const auto n = static_cast<int>(r.size());
    if (p.size() != (std::size_t{1} << (n - 1))) {
        throw Error(ErrorCode::ShapeMismatch, "p must have 2^{n-1} entries");
    }
    const double ratio = sum_squares(r) / sum_squares(p);
    Eigen::MatrixXd cosines = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)] == 0.0) {
                throw Error(ErrorCode::DivisionByZero, "question " + std::to_string(r[i] == 0.0 ? i : j) +
                                                           " is never asked; drop that bit instead");
            }
            double split = 0.0;
            for (std::size_t x = 0; x < p.size(); ++x) {
                double sign = bit(x, i, n) == bit(x, j, n) ? 1.0 : -1.0;
                split += sign * p[x] * p[x];
            }
            double c = ratio * split / (2.0 * r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)]);
            cosines(i, j) = c;
            cosines(j, i) = c;
        }
    }
    return make_gram(cosines);
}

bool string_conditions_hold(const std::vector<double> &p, const std::vector<double> &r, const GramConfig &gram,
                            double tol) {
    const auto n = static_cast<int>(r.size());
    const double sp = sum_squares(p);
    const double sr = sum_squares(r);
    for (std::size_t x = 0; x < p.size(); ++x) {
        double lhs = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double sign = bit(x, i, n) == bit(x, j, n) ? 1.0 : -1.0;
                lhs += sign * r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)] * gram.cosines(i, j);
            }
        }
        double rhs = 0.5 * sr * (static_cast<double>(p.size()) * p[x] * p[x] / sp - 1.0);
        if (std::abs(lhs - rhs) > tol) {
            return false;
        }
    }
    return true;
}

TheoryResult value_2bit(double p00, double p01, double r0, double r1) {
    TheoryResult out;
    out.kind = ResultKind::Exact;
    out.attained = Attainment::Attained;
    const double gap = std::abs(r0 - r1);
    const double aligned = 0.5 + 0.5 * p00 + 0.5 * p01 * gap;
    const double opposed = 0.5 + 0.5 * p00 * gap + 0.5 * p01;
    const double sp = p00 * p00 + p01 * p01;
    if (r0 * r1 > 0.0 && sp > 0.0) {
        const double c = (r0 * r0 + r1 * r1) / (2.0 * r0 * r1) * (p00 * p00 - p01 * p01) / sp;
        if (std::abs(c) <= 1.0) {
            out.value = 0.5 + std::sqrt(sp) * std::sqrt(r0 * r0 + r1 * r1) / std::sqrt(2.0);
            out.gram = two_bit_gram(c);
            out.note = "quantum branch";
            return out;
        }
    }
    out.value = std::max(aligned, opposed);
    out.gram = two_bit_gram(aligned >= opposed ? 1.0 : -1.0);
    out.note = "commuting measurements";
    return out;
}

TheoryResult value_3bit(const std::vector<double> &p, const std::vector<double> &r) {
    if (p.size() != 4 || r.size() != 3) {
        throw Error(ErrorCode::ShapeMismatch, "value_3bit needs 4 flip-pair weights and 3 question weights");
    }
    std::vector<int> zero;
    for (int k = 0; k < 3; ++k) {
        if (r[static_cast<std::size_t>(k)] == 0.0) {
            zero.push_back(k);
        }
    }
    if (zero.size() >= 2) {
        TheoryResult out;
        out.value = 1.0;
        out.kind = ResultKind::Exact;
        out.attained = Attainment::Attained;
        out.note = "only one question is asked";
        return out;
    }
    if (zero.size() == 1) {
        // Merge flip pairs that differ only in the unasked bit.
        std::vector<int> kept;
        for (int k = 0; k < 3; ++k) {
            if (k != zero[0]) {
                kept.push_back(k);
            }
        }
        double pe = 0.0;
        double po = 0.0;
        for (std::size_t x = 0; x < 4; ++x) {
            (bit(x, kept[0], 3) == bit(x, kept[1], 3) ? pe : po) += p[x];
        }
        auto out = value_2bit(pe, po, r[static_cast<std::size_t>(kept[0])], r[static_cast<std::size_t>(kept[1])]);
        out.note += "; question " + std::to_string(zero[0]) + " is never asked";
        return out;
    }

    auto gram = cosines_from_bias(p, r);
    TheoryResult out;
    if (gram.consistent()) {
        out.value = upper_bound_n2(p, r);
        out.kind = ResultKind::Exact;
        out.attained = Attainment::Attained;
        out.note = gram.rank == 3 ? "saturating cosines, independent Bloch vectors"
                                  : "saturating cosines on the boundary of the consistent region";
        out.gram = std::move(gram);
        return out;
    }
    const double scale = std::max({p[1], p[2], p[3], r[1], r[2]});
    const bool x_one_pattern = std::abs(p[1] - p[2]) <= kPatternTol * std::max(1.0, scale) &&
                               std::abs(p[1] - p[3]) <= kPatternTol * std::max(1.0, scale) &&
                               std::abs(r[1] - r[2]) <= kPatternTol && r[0] >= r[1] - kPatternTol;
    if (x_one_pattern) {
        // Measurements 1 and 2 coincide; optimize the remaining angle.
        const double r0 = r[0];
        const double r1 = r[1];
        const double p000 = p[0];
        const double p100 = p[3];
        const double base = 0.5 + 0.5 * r0 * (p[2] + p[1]);
        const double s2 = p000 * p000 + p100 * p100;
        const double q = r0 * r0 + 4.0 * r1 * r1;
        const double c_opt = q / (4.0 * r0 * r1) * (p000 * p000 - p100 * p100) / s2;
        double c = c_opt;
        if (std::abs(c_opt) < 1.0) {
            out.value = base + std::sqrt(q) * std::sqrt(s2) / std::sqrt(2.0);
        } else {
            auto edge = [&](double cc) {
                return base + 0.5 * p000 * std::sqrt(std::max(0.0, q + 4.0 * r0 * r1 * cc)) +
                       0.5 * p100 * std::sqrt(std::max(0.0, q - 4.0 * r0 * r1 * cc));
            };
            c = edge(1.0) >= edge(-1.0) ? 1.0 : -1.0;
            out.value = edge(c);
        }
        Eigen::MatrixXd cosines(3, 3);
        cosines << 1.0, c, c, c, 1.0, 1.0, c, 1.0, 1.0;
        out.gram = make_gram(cosines);
        out.kind = ResultKind::Exact;
        out.attained = Attainment::Attained;
        out.note = "measurements 1 and 2 aligned";
        return out;
    }
    out.value = upper_bound_n2(p, r);
    out.kind = ResultKind::UpperBound;
    out.attained = Attainment::Unknown;
    out.gram = std::move(gram);
    out.note = "saturating cosines inconsistent and no closed form is known for this pattern";
    return out;
}

double constant_guess_value(const BiasTensor &t, int k) {
    const auto &p = t.params();
    double best = 0.0;
    for (int b = 0; b < p.m; ++b) {
        double v = 0.0;
        for (std::size_t x = 0; x < p.num_strings(); ++x) {
            v += t(x, k, b);
        }
        best = std::max(best, v);
    }
    return best;
}

std::optional<BiasTensor> reduced_tensor(const BiasTensor &t, const std::vector<int> &s) {
    const auto &p = t.params();
    auto red = reduce(t, s);
    if (red.kept.size() < 2 || red.kept_weight <= 0.0) {
        return std::nullopt;
    }
    ScenarioParams q{static_cast<int>(red.kept.size()), p.m, p.d};
    std::vector<double> entries(q.num_strings() * static_cast<std::size_t>(q.n * q.m), 0.0);
    for (std::size_t x = 0; x < p.num_strings(); ++x) {
        std::size_t xr = 0;
        for (int k : red.kept) {
            xr = xr * static_cast<std::size_t>(p.m) + static_cast<std::size_t>(p.character(x, k));
        }
        for (int yr = 0; yr < q.n; ++yr) {
            for (int b = 0; b < p.m; ++b) {
                entries[(xr * q.n + yr) * q.m + b] += t(x, red.kept[static_cast<std::size_t>(yr)], b);
            }
        }
    }
    return BiasTensor::from_entries(q, std::move(entries), true);
}

TheoryResult bit_drop_value(const BiasTensor &t, const std::vector<int> &s, const ResidualEvaluator &residual) {
    require_factorizable_bits(t);
    auto red = reduce(t, s);
    TheoryResult out;
    out.kind = ResultKind::Exact;
    out.attained = Attainment::Attained;
    out.drop_set = s;
    out.value = red.dropped;
    if (red.kept.size() == 1) {
        out.value += red.kept_weight;
    } else if (auto reduced = reduced_tensor(t, s)) {
        out.value += red.kept_weight * residual(*reduced);
    }
    return out;
}

TheoryResult x_plane_value(int n, double a) {
    if (n != 2 && n != 3) {
        throw Error(ErrorCode::OutOfTheoryScope, "X_PLANE closed form covers n = 2 and n = 3");
    }
    a = std::max(a, 1.0 - a);
    TheoryResult out;
    out.kind = ResultKind::Exact;
    out.attained = Attainment::Attained;
    if (n == 2) {
        const double all_bits = 0.5 * (1.0 + 1.0 / std::sqrt(2.0));
        if (a <= 1.0 / std::sqrt(2.0)) {
            out.value = all_bits;
            out.drop_set = std::vector<int>{};
        } else {
            out.value = 0.5 * (1.0 + a);
            out.drop_set = std::vector<int>{0};
        }
    } else {
        const double threshold = 0.5 * (1.0 + std::sqrt(3.0) - std::sqrt(2.0));
        if (a <= threshold) {
            out.value = 0.5 * (1.0 + 1.0 / std::sqrt(3.0));
            out.drop_set = std::vector<int>{};
        } else {
            out.value = (a + 1.0 + 1.0 / std::sqrt(2.0)) / 3.0;
            out.drop_set = std::vector<int>{0};
        }
    }
    return out;
}

TheoryResult b_one_value(double w0) {
    if (!(w0 >= 0.0 && w0 <= 1.0)) {
        throw Error(ErrorCode::InvalidWeight, "B_ONE weight outside [0, 1]");
    }
    const double mu = w0 * (1.0 - w0);
    TheoryResult out;
    out.kind = ResultKind::Exact;
    out.attained = Attainment::Attained;
    if (mu > 0.0 && 4.0 * mu + 16.0 * mu * mu >= 1.0) {
        const double half_cos_sq = 1.0 / (4.0 * mu + 16.0 * mu * mu);
        out.value = 0.5 + std::sqrt(1.0 + 4.0 * mu) / (8.0 * std::sqrt(mu));
        out.gram = two_bit_gram(2.0 * half_cos_sq - 1.0);
        out.note = "quantum branch";
    } else {
        out.value = 0.5 + 0.25 * (1.0 + std::abs(2.0 * w0 - 1.0));
        out.gram = two_bit_gram(1.0);
        out.note = "commuting measurements";
    }
    return out;
}

double upper_bound_2d(const std::vector<double> &alpha, double r0, double r1) {
    const auto d = static_cast<double>(std::lround(std::sqrt(static_cast<double>(alpha.size()))));
    if (d * d != static_cast<double>(alpha.size())) {
        throw Error(ErrorCode::ShapeMismatch, "alpha must be a d x d table");
    }
    return 0.5 + 0.5 * std::sqrt(d * d - 4.0 * d * (d - 1.0) * r0 * r1) * std::sqrt(sum_squares(alpha));
}

Attainability2d attainability_2d(const std::vector<double> &alpha, double r0, double r1) {
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(alpha.size()))));
    if (d * d != static_cast<int>(alpha.size())) {
        throw Error(ErrorCode::ShapeMismatch, "alpha must be a d x d table");
    }
    Attainability2d out;
    const double dd = d;
    out.c_squared = (dd * dd - 4.0 * r0 * r1 * dd * (dd - 1.0)) / sum_squares(alpha);
    const double q = 4.0 * r0 * r1;
    out.b_target = Eigen::MatrixXd::Zero(d, d);
    out.ranks.assign(2, std::vector<double>(static_cast<std::size_t>(d), 0.0));
    if (q <= 0.0) {
        out.verdict = NecessaryConditions::Unknown;
        return out;
    }
    for (int a = 0; a < d; ++a) {
        double row = 0.0;
        double col = 0.0;
        for (int b = 0; b < d; ++b) {
            row += alpha[static_cast<std::size_t>(a * d + b)] * alpha[static_cast<std::size_t>(a * d + b)];
            col += alpha[static_cast<std::size_t>(b * d + a)] * alpha[static_cast<std::size_t>(b * d + a)];
            double ab = alpha[static_cast<std::size_t>(a * d + b)];
            out.b_target(a, b) = 1.0 + (out.c_squared * ab * ab - 1.0) / q;
        }
        out.ranks[0][static_cast<std::size_t>(a)] = (dd * (q - 1.0) + out.c_squared * row) / q;
        out.ranks[1][static_cast<std::size_t>(a)] = (dd * (q - 1.0) + out.c_squared * col) / q;
    }
    out.ranks_feasible = true;
    for (const auto &ranks : out.ranks) {
        double total = 0.0;
        for (double v : ranks) {
            out.ranks_feasible = out.ranks_feasible && std::abs(v - std::round(v)) <= 1e-9 && v >= -1e-9 &&
                                 v <= dd + 1e-9;
            total += v;
        }
        out.ranks_feasible = out.ranks_feasible && std::abs(total - dd) <= 1e-9;
    }
    out.b_feasible = true;
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            // Saturating lambda_max <= 1 forces tr(M_0^a M_1^b) <= 1.
            double cap = std::min({1.0, std::round(out.ranks[0][static_cast<std::size_t>(a)]),
                                   std::round(out.ranks[1][static_cast<std::size_t>(b)])});
            double v = out.b_target(a, b);
            out.b_feasible = out.b_feasible && v >= -1e-9 && v <= cap + 1e-9;
        }
    }
    out.verdict = out.ranks_feasible && out.b_feasible ? NecessaryConditions::Pass : NecessaryConditions::Fail;
    return out;
}

BiasTensor bias_from_measurements(const Povm &m0, const Povm &m1, double r0, double r1) {
    if (m0.dim() != m1.dim() || m0.size() != m1.size() || m0.size() != m0.dim()) {
        throw Error(ErrorCode::ShapeMismatch, "need two d-outcome measurements on C^d");
    }
    for (const auto *povm : {&m0, &m1}) {
        for (const auto &m : povm->outcomes) {
            if (projectiveness_defect(m) >= 1e-7) {
                throw Error(ErrorCode::NotProjective, "measurement operators must be projectors");
            }
        }
    }
    if (!(r0 >= 0.0 && r1 >= 0.0) || std::abs(r0 + r1 - 1.0) > kNormalizationTol) {
        throw Error(ErrorCode::InvalidWeight, "question weights must be a distribution");
    }
    const int d = m0.dim();
    std::vector<double> alpha(static_cast<std::size_t>(d * d));
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            double overlap = (m0.outcomes[static_cast<std::size_t>(a)] * m1.outcomes[static_cast<std::size_t>(b)])
                                 .trace()
                                 .real();
            alpha[static_cast<std::size_t>(a * d + b)] = std::sqrt(std::max(0.0, 1.0 + 4.0 * r0 * r1 * (overlap - 1.0)));
        }
    }
    double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    for (auto &v : alpha) {
        v /= total;
    }
    std::vector<double> r{r0, r1};
    return product_tensor(ScenarioParams{2, d, d}, alpha, r);
}

TheoryResult classical_value_n2(const BiasTensor &t) {
    const auto &p = t.params();
    if (p.m != 2 || p.d != 2 || t.kind() != TensorKind::Rac) {
        throw Error(ErrorCode::OutOfTheoryScope, "classical_value_n2 needs m = d = 2 and a RAC tensor");
    }
    if (p.n > 12) {
        throw Error(ErrorCode::OutOfTheoryScope, "too many bits for the drop-set enumeration");
    }
    // Per bit: 0/1 constant guess (bit dropped), 2 identity, 3 flipped.
    std::vector<int> choice(static_cast<std::size_t>(p.n), 0);
    const std::size_t total = std::size_t{1} << (2 * p.n);
    TheoryResult best;
    best.value = -1.0;
    for (std::size_t code = 0; code < total; ++code) {
        for (int k = 0; k < p.n; ++k) {
            choice[static_cast<std::size_t>(k)] = static_cast<int>((code >> (2 * (p.n - 1 - k))) & 3U);
        }
        double value = 0.0;
        std::vector<int> dropped;
        for (std::size_t x = 0; x < p.num_strings(); ++x) {
            double majority[2] = {0.0, 0.0};
            for (int y = 0; y < p.n; ++y) {
                int c = choice[static_cast<std::size_t>(y)];
                if (c < 2) {
                    value += t(x, y, c);
                } else {
                    int xy = p.character(x, y);
                    int mu_right = c == 2 ? xy : 1 - xy;
                    majority[mu_right] += t(x, y, xy);
                }
            }
            value += std::max(majority[0], majority[1]);
        }
        if (value > best.value + 1e-15) {
            best.value = value;
            for (int k = 0; k < p.n; ++k) {
                if (choice[static_cast<std::size_t>(k)] < 2) {
                    dropped.push_back(k);
                }
            }
            best.drop_set = dropped;
        }
    }
    best.kind = ResultKind::Classical;
    best.attained = Attainment::Attained;
    best.note = "weighted majority encoding over kept bits";
    return best;
}

TheoryResult theory_value(const BiasTensor &t) {
    const auto &p = t.params();
    if (p.m == 2 && p.d == 2 && t.kind() == TensorKind::Rac) {
        if (!is_factorizable(t, 1e-10).factorizable) {
            double w0 = 0.0;
            if (matches_b_one(t, w0)) {
                auto out = b_one_value(w0);
                out.note += " (B_ONE closed form)";
                return out;
            }
            throw Error(ErrorCode::OutOfTheoryScope,
                        "nonfactorizable biases are covered only for B_ONE on 2^2-->1");
        }
        if (p.n > 12) {
            throw Error(ErrorCode::OutOfTheoryScope, "too many bits for the drop-set enumeration");
        }
        std::vector<TheoryResult> branches;
        for (std::size_t mask = 0; mask < (std::size_t{1} << p.n); ++mask) {
            std::vector<int> s;
            for (int k = 0; k < p.n; ++k) {
                if (mask & (std::size_t{1} << k)) {
                    s.push_back(k);
                }
            }
            if (s.empty()) {
                auto branch = all_bits_value(flip_pair_data(t));
                branch.drop_set = s;
                branches.push_back(std::move(branch));
                continue;
            }
            std::optional<TheoryResult> residual_result;
            auto branch = bit_drop_value(t, s, [&](const BiasTensor &reduced) {
                residual_result = all_bits_value(flip_pair_data(reduced));
                return residual_result->value;
            });
            if (residual_result) {
                branch.kind = residual_result->kind;
                branch.attained = residual_result->attained;
                branch.gram = residual_result->gram;
            }
            branches.push_back(std::move(branch));
        }
        std::size_t win = 0;
        for (std::size_t i = 1; i < branches.size(); ++i) {
            if (branches[i].value > branches[win].value + 1e-13) {
                win = i;
            }
        }
        TheoryResult out = branches[win];
        bool dominated = true;
        for (const auto &b : branches) {
            if (b.kind == ResultKind::UpperBound && b.value > out.value + 1e-12) {
                dominated = false;
            }
        }
        if (out.kind == ResultKind::Exact && !dominated) {
            out.kind = ResultKind::UpperBound;
            out.attained = Attainment::Unknown;
        }
        return out;
    }
    if (p.n == 2 && p.m == p.d && t.kind() == TensorKind::Rac) {
        auto fact = is_factorizable(t, 1e-10);
        if (!fact.factorizable) {
            throw Error(ErrorCode::OutOfTheoryScope, "the 2^d bound needs a factorizable bias");
        }
        TheoryResult out;
        out.value = upper_bound_2d(fact.alpha_x, fact.r_y[0], fact.r_y[1]);
        out.kind = ResultKind::UpperBound;
        const double uniform = 1.0 / static_cast<double>(fact.alpha_x.size());
        bool flat = std::all_of(fact.alpha_x.begin(), fact.alpha_x.end(),
                                [&](double a) { return std::abs(a - uniform) <= kPatternTol; });
        auto att = attainability_2d(fact.alpha_x, fact.r_y[0], fact.r_y[1]);
        if (flat) {
            out.attained = Attainment::Attained;
            out.note = "bound over projective measurements, attained by mutually unbiased bases";
        } else if (att.verdict == NecessaryConditions::Fail) {
            out.attained = Attainment::NotAttained;
            out.note = "bound over projective measurements; necessary rank conditions fail";
        } else {
            out.attained = Attainment::Unknown;
            out.note = std::string("bound over projective measurements; ") +
                       std::string(necessary_conditions_name(att.verdict));
        }
        return out;
    }
    throw Error(ErrorCode::OutOfTheoryScope, "no theory result covers the " + scenario_label(p) + " scenario");
}

}  // namespace racforge
