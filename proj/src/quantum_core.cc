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

#include "racforge/quantum_core.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "racforge/error.h"

namespace racforge {

namespace {

constexpr double kPinvCutoff = 1e-12;
constexpr double kHelstromZero = 1e-13;

Matrix identity(int d) {
    return Matrix::Identity(d, d);
}

// Hermitian A -> f(A) applied through the eigendecomposition.
template <typename F>
Matrix spectral_map(const Matrix &a, F f) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a));
    Eigen::VectorXd mapped = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix clip_negative(const Matrix &a) {
    return spectral_map(a, [](double v) { return std::max(v, 0.0); });
}

Matrix pinv_sqrt(const Matrix &a) {
    return spectral_map(a, [](double v) { return v > kPinvCutoff ? 1.0 / std::sqrt(v) : 0.0; });
}

// Unitary factor of the polar decomposition.
Matrix polar_unitary(const Matrix &g) {
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

void finalize(const std::vector<Matrix> &states, DiscriminationSolution &sol) {
    sol.value = discrimination_value(states, sol.povm);
    auto cert = discrimination_certificate(states, sol.povm);
    sol.certificate_gap = cert.gap;
    sol.hermiticity_defect = cert.hermiticity_defect;
}

void validate_instance(const std::vector<Matrix> &states) {
    if (states.size() < 2) {
        throw Error(ErrorCode::WrongOutcomeCount, "discrimination needs at least two states");
    }
    for (const auto &s : states) {
        require_hermitian(s);
        if (s.rows() != states.front().rows()) {
            throw Error(ErrorCode::ShapeMismatch, "states of different dimensions");
        }
    }
}

// Maximizes sum_b tr(V_b^dagger rho_b V_b) over unitaries V = [V_0 | ... ]
// split into column groups of the given ranks. Each polar step is monotone.
Povm projective_polish(const std::vector<Matrix> &states, const std::vector<int> &ranks, Matrix v) {
    const auto d = static_cast<int>(v.rows());
    v = polar_unitary(v);
    auto objective = [&](const Matrix &u) {
        double total = 0.0;
        int col = 0;
        for (std::size_t b = 0; b < states.size(); ++b) {
            auto block = u.middleCols(col, ranks[b]);
            total += (block.adjoint() * states[b] * block).trace().real();
            col += ranks[b];
        }
        return total;
    };
    double last = objective(v);
    for (int it = 0; it < 2000; ++it) {
        Matrix g(d, d);
        int col = 0;
        for (std::size_t b = 0; b < states.size(); ++b) {
            g.middleCols(col, ranks[b]) = states[b] * v.middleCols(col, ranks[b]);
            col += ranks[b];
        }
        Matrix next = polar_unitary(g);
        double value = objective(next);
        if (value < last) {
            break;
        }
        v = next;
        bool settled = value - last <= 1e-16;
        last = value;
        if (settled) {
            break;
        }
    }
    Povm out;
    int col = 0;
    for (std::size_t b = 0; b < states.size(); ++b) {
        auto block = v.middleCols(col, ranks[b]);
        out.outcomes.push_back(hermitize(block * block.adjoint()));
        col += ranks[b];
    }
    return out;
}

// Projective rounding of a POVM: rank = eigenvalues above 1/2.
std::optional<DiscriminationSolution> try_polish(const std::vector<Matrix> &states, const Povm &povm) {
    const int d = povm.dim();
    std::vector<int> ranks;
    Matrix v(d, d);
    int col = 0;
    for (const auto &m : povm.outcomes) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
        int rank = 0;
        for (int i = d - 1; i >= 0; --i) {
            if (es.eigenvalues()(i) > 0.5) {
                if (col >= d) {
                    return std::nullopt;
                }
                v.col(col++) = es.eigenvectors().col(i);
                ++rank;
            }
        }
        ranks.push_back(rank);
    }
    if (col != d) {
        return std::nullopt;
    }
    DiscriminationSolution sol;
    sol.povm = projective_polish(states, ranks, v);
    finalize(states, sol);
    return sol;
}

bool better(const DiscriminationSolution &a, const DiscriminationSolution &b) {
    return a.value >= b.value - 1e-12 && a.certificate_gap >= b.certificate_gap - 1e-12;
}

DiscriminationSolution fixed_point(const std::vector<Matrix> &states, Povm start,
                                   const DiscriminationOptions &options) {
    const int d = static_cast<int>(states.front().rows());
    const auto k = states.size();
    DiscriminationSolution best;
    best.povm = start;
    finalize(states, best);
    Povm current = std::move(start);
    double previous = best.value;
    int stagnant = 0;
    for (int it = 1; it <= options.max_iter; ++it) {
        Matrix lambda = Matrix::Zero(d, d);
        for (std::size_t b = 0; b < k; ++b) {
            lambda += states[b] * current.outcomes[b] * states[b];
        }
        Matrix root = pinv_sqrt(lambda);
        Matrix total = Matrix::Zero(d, d);
        for (std::size_t b = 0; b < k; ++b) {
            current.outcomes[b] = clip_negative(root * states[b] * current.outcomes[b] * states[b] * root);
            total += current.outcomes[b];
        }
        current.outcomes.back() = hermitize(current.outcomes.back() + identity(d) - total);
        double value = discrimination_value(states, current);
        if (value > best.value) {
            best.povm = current;
            best.value = value;
        }
        stagnant = value - previous < options.tol ? stagnant + 1 : 0;
        previous = value;
        best.iterations = it;
        if (it % 25 == 0 || stagnant >= 50) {
            finalize(states, best);
            if (best.certificate_gap >= -options.certificate_target) {
                break;
            }
            if (auto polished = try_polish(states, best.povm);
                polished && polished->certificate_gap >= -options.certificate_target) {
                polished->iterations = it;
                return *polished;
            }
            if (stagnant >= 50) {
                break;
            }
        }
    }
    finalize(states, best);
    if (auto polished = try_polish(states, best.povm); polished && better(*polished, best)) {
        polished->iterations = best.iterations;
        return *polished;
    }
    return best;
}

}  // namespace

double hermiticity_defect(const Matrix &a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

Matrix hermitize(const Matrix &a) {
    return (a + a.adjoint()) * 0.5;
}

void require_hermitian(const Matrix &a) {
    if (hermiticity_defect(a) > kHermitianTol) {
        throw Error(ErrorCode::ShapeMismatch, "operator is not Hermitian");
    }
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix &a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

EigenPair top_eigenvector(const Matrix &a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a));
    const auto last = a.rows() - 1;
    return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

double completeness_defect(const Povm &povm) {
    Matrix total = Matrix::Zero(povm.dim(), povm.dim());
    for (const auto &m : povm.outcomes) {
        total += m;
    }
    return (total - identity(povm.dim())).norm();
}

double min_outcome_eigenvalue(const Povm &povm) {
    double out = std::numeric_limits<double>::infinity();
    for (const auto &m : povm.outcomes) {
        out = std::min(out, hermitian_eigenvalues(m)(0));
    }
    return out;
}

bool is_valid_povm(const Povm &povm, double tol) {
    if (povm.outcomes.empty()) {
        return false;
    }
    for (const auto &m : povm.outcomes) {
        if (m.rows() != povm.dim() || m.cols() != povm.dim() || hermiticity_defect(m) > kHermitianTol) {
            return false;
        }
    }
    return min_outcome_eigenvalue(povm) >= -tol && completeness_defect(povm) <= tol;
}

Certificate discrimination_certificate(const std::vector<Matrix> &states, const Povm &povm) {
    const auto d = states.front().rows();
    Matrix y = Matrix::Zero(d, d);
    for (std::size_t b = 0; b < states.size(); ++b) {
        y += 0.5 * (states[b] * povm.outcomes[b] + povm.outcomes[b] * states[b]);
    }
    Certificate out;
    out.hermiticity_defect = hermiticity_defect(y);
    out.gap = std::numeric_limits<double>::infinity();
    for (const auto &s : states) {
        out.gap = std::min(out.gap, hermitian_eigenvalues(y - s)(0));
    }
    return out;
}

double discrimination_value(const std::vector<Matrix> &states, const Povm &povm) {
    double total = 0.0;
    for (std::size_t b = 0; b < states.size(); ++b) {
        total += (povm.outcomes[b] * states[b]).trace().real();
    }
    return total;
}

DiscriminationSolution helstrom_two_outcome(const std::vector<Matrix> &states) {
    if (states.size() != 2) {
        throw Error(ErrorCode::WrongOutcomeCount, "Helstrom measurement needs exactly two states");
    }
    validate_instance(states);
    const auto d = static_cast<int>(states[0].rows());
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(states[0] - states[1]));
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Matrix plus = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        if (es.eigenvalues()(i) >= -kHelstromZero * scale) {
            plus += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
        }
    }
    DiscriminationSolution sol;
    sol.povm.outcomes = {hermitize(plus), hermitize(identity(d) - plus)};
    finalize(states, sol);
    return sol;
}

DiscriminationSolution discriminate(const std::vector<Matrix> &states, const DiscriminationOptions &options) {
    validate_instance(states);
    if (states.size() == 2 && !options.force_iterative) {
        return helstrom_two_outcome(states);
    }
    const int d = static_cast<int>(states.front().rows());
    const auto k = static_cast<int>(states.size());

    std::optional<DiscriminationSolution> best;
    if (options.warm_start && options.warm_start->size() == k && options.warm_start->dim() == d) {
        if (auto polished = try_polish(states, *options.warm_start);
            polished && polished->certificate_gap >= -options.certificate_target) {
            return *polished;
        }
    }

    Povm uniform;
    uniform.outcomes.assign(static_cast<std::size_t>(k), identity(d) / static_cast<double>(k));
    best = fixed_point(states, uniform, options);

    std::mt19937_64 rng(options.restart_seed);
    for (int restart = 0; restart < options.restarts && best->certificate_gap < -options.certificate_target;
         ++restart) {
        Povm noise = random_povm(d, k, rng, false, false);
        Povm start;
        for (int b = 0; b < k; ++b) {
            start.outcomes.push_back(0.5 * best->povm.outcomes[static_cast<std::size_t>(b)] +
                                     0.5 * noise.outcomes[static_cast<std::size_t>(b)]);
        }
        auto candidate = fixed_point(states, start, options);
        if (candidate.value > best->value + 1e-14 ||
            (candidate.value >= best->value - 1e-14 && candidate.certificate_gap > best->certificate_gap)) {
            best = candidate;
        }
    }
    best->no_convergence = best->certificate_gap < -1e-6;
    return *best;
}

Matrix haar_unitary(int d, std::mt19937_64 &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(d, d);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            z(i, j) = Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * identity(d);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
        Complex diag = r(i, i);
        double mag = std::abs(diag);
        q.col(i) *= mag > 0.0 ? diag / mag : Complex(1.0);
    }
    return q;
}

Vector haar_state(int d, std::mt19937_64 &rng) {
    return haar_unitary(d, rng).col(0);
}

Povm random_povm(int d, int k, std::mt19937_64 &rng, bool diagonal, bool projective) {
    Povm out;
    if (diagonal) {
        std::exponential_distribution<double> expo(1.0);
        Eigen::MatrixXd weights(k, d);
        for (int i = 0; i < d; ++i) {
            for (int b = 0; b < k; ++b) {
                weights(b, i) = expo(rng);
            }
            weights.col(i) /= weights.col(i).sum();
        }
        for (int b = 0; b < k; ++b) {
            Matrix m = Matrix::Zero(d, d);
            for (int i = 0; i < d; ++i) {
                m(i, i) = weights(b, i);
            }
            out.outcomes.push_back(m);
        }
        return out;
    }
    if (projective && k <= d) {
        Matrix u = haar_unitary(d, rng);
        int col = 0;
        for (int b = 0; b < k; ++b) {
            int rank = d / k + (b < d % k ? 1 : 0);
            auto block = u.middleCols(col, rank);
            out.outcomes.push_back(hermitize(block * block.adjoint()));
            col += rank;
        }
        return out;
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Matrix> raw;
    Matrix total = Matrix::Zero(d, d);
    for (int b = 0; b < k; ++b) {
        Matrix g(d, d);
        for (int j = 0; j < d; ++j) {
            for (int i = 0; i < d; ++i) {
                g(i, j) = Complex(normal(rng), normal(rng));
            }
        }
        raw.push_back(g * g.adjoint());
        total += raw.back();
    }
    Matrix root = pinv_sqrt(total);
    for (const auto &a : raw) {
        out.outcomes.push_back(hermitize(root * a * root));
    }
    return out;
}

std::vector<Povm> random_realization(const ScenarioParams &params, std::uint64_t rng_seed, bool diagonal,
                                     bool projective_seed) {
    params.validate();
    std::mt19937_64 rng(rng_seed);
    std::vector<Povm> out;
    for (int y = 0; y < params.n; ++y) {
        out.push_back(random_povm(params.d, params.m, rng, diagonal, projective_seed));
    }
    return out;
}

}  // namespace racforge
