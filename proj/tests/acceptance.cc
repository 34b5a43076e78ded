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

// End-to-end acceptance runs. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "racforge/analysis.h"
#include "racforge/classical_search.h"
#include "racforge/error.h"
#include "racforge/quantum_core.h"
#include "racforge/scenario.h"
#include "racforge/seesaw.h"
#include "racforge/theory.h"

using namespace racforge;

namespace {

int hardware_threads() {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Collects the failures of one criterion.
class Check {
   public:
    void expect(bool ok, const std::string &what) {
        if (!ok) {
            ++failures_;
            if (failures_ <= 10) {
                std::printf("    failed: %s\n", what.c_str());
            }
        }
    }
    void near(double actual, double expected, double tol, const std::string &what) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s: got %.15g, want %.15g (tol %g, diff %.3g)", what.c_str(), actual, expected,
                      tol, std::abs(actual - expected));
        expect(std::abs(actual - expected) <= tol, buf);
    }
    int failures() const {
        return failures_;
    }

   private:
    int failures_ = 0;
};

std::string fmt(const char *f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

SeesawConfig tight(int seeds, std::uint64_t rng_seed) {
    SeesawConfig cfg;
    cfg.seeds = seeds;
    cfg.prob_bound = 1e-13;
    cfg.meas_bound = 1e-10;
    cfg.max_iterations = 5000;
    cfg.rng_seed = rng_seed;
    cfg.threads = hardware_threads();
    return cfg;
}

// 1/2 + sqrt(2^{n-3}) sqrt(sum p^2) sqrt(sum r^2) from the raw tensor.
double bound_from_tensor(const BiasTensor &t) {
    const auto &p = t.params();
    const std::size_t half = p.num_strings() / 2;
    double sp = 0.0;
    for (std::size_t x = 0; x < half; ++x) {
        double px = 0.0;
        for (int y = 0; y < p.n; ++y) {
            px += t.weight_xy(x, y) + t.weight_xy(p.complement(x), y);
        }
        sp += px * px;
    }
    double sr = 0.0;
    for (int y = 0; y < p.n; ++y) {
        double ry = 0.0;
        for (std::size_t x = 0; x < p.num_strings(); ++x) {
            ry += t.weight_xy(x, y);
        }
        sr += ry * ry;
    }
    return 0.5 + std::sqrt(std::pow(2.0, p.n - 3)) * std::sqrt(sp) * std::sqrt(sr);
}

// Cosine between the Bloch vectors of questions i and j that saturates the
// bound, built directly from the flip-pair weights.
double saturating_cosine(const BiasTensor &t, int i, int j) {
    const auto &p = t.params();
    const std::size_t half = p.num_strings() / 2;
    double same = 0.0;
    double differ = 0.0;
    for (std::size_t x = 0; x < half; ++x) {
        double px = 0.0;
        for (int y = 0; y < p.n; ++y) {
            px += t.weight_xy(x, y) + t.weight_xy(p.complement(x), y);
        }
        (p.character(x, i) == p.character(x, j) ? same : differ) += px * px;
    }
    std::vector<double> r(static_cast<std::size_t>(p.n), 0.0);
    double sr = 0.0;
    for (int y = 0; y < p.n; ++y) {
        for (std::size_t x = 0; x < p.num_strings(); ++x) {
            r[static_cast<std::size_t>(y)] += t.weight_xy(x, y);
        }
        sr += r[static_cast<std::size_t>(y)] * r[static_cast<std::size_t>(y)];
    }
    return sr / (2 * r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)]) * (same - differ) /
           (same + differ);
}

BiasTensor x_one(int n, double w, const std::vector<double> &r) {
    return generate_bias({n, 2, 2}, {BiasFamily::XOne, {w}, r, {}});
}

// ---------------------------------------------------------------------------

int criterion_1(Check &c) {
    struct Row {
        int n, m, d;
        long num, den;
        bool cross_check;
    };
    std::vector<Row> rows{{2, 2, 2, 3, 4, true},   {2, 2, 3, 7, 8, true},   {3, 2, 2, 3, 4, true},
                          {2, 2, 4, 1, 1, true},   {2, 2, 5, 1, 1, true},   {2, 2, 6, 1, 1, true},
                          {2, 2, 7, 1, 1, true},   {2, 2, 8, 1, 1, true},   {2, 3, 2, 5, 9, true},
                          {3, 2, 3, 19, 24, false}, {2, 3, 3, 2, 3, false}, {2, 4, 2, 7, 16, false},
                          {4, 2, 2, 11, 16, false}, {3, 2, 4, 5, 6, false}};
    for (const auto &row : rows) {
        ScenarioParams p{row.n, row.m, row.d};
        auto t = unbiased_tensor(p);
        const double want = static_cast<double>(row.num) / static_cast<double>(row.den);
        const std::string label = scenario_label(p);
        auto started = std::chrono::steady_clock::now();
        auto r = perform_search(t, {SearchMethod::Decodings, 1'000'000'000ULL, 1});
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::printf("    %-14s method 2: %.17g (%ld/%ld) in %.3f s\n", label.c_str(), r.value, row.num, row.den, secs);
        c.expect(r.value == want, label + " method 2 value " + fmt("%.17g", r.value));
        c.expect(secs < 60.0, label + " method 2 took " + fmt("%.1f s", secs));
        if (row.cross_check) {
            auto r0 = perform_search(t, {SearchMethod::Combined, 1'000'000'000ULL, hardware_threads()});
            std::printf("    %-14s method 0: %.17g in %.3f s\n", label.c_str(), r0.value, r0.elapsed_seconds);
            c.expect(r0.value == want, label + " method 0 value " + fmt("%.17g", r0.value));
        }
    }
    return c.failures();
}

int criterion_2(Check &c) {
    auto t = unbiased_tensor({2, 2, 2});
    auto cfg = tight(5, 1);
    cfg.closeness = 1e-13;
    auto out = perform_seesaw(t, cfg);
    c.near(out.best_value, 0.853553390593, 1e-9, "best value");
    c.expect(out.seeds_close_to_best == 5, "seeds within 1e-13: " + std::to_string(out.seeds_close_to_best));
    auto a = analyze(out.best_realization.measurements, {1e-7, 1e-7, 5e-6});
    c.expect(a.all_rank_one(), "rank one");
    c.expect(a.all_projective(), "projective");
    for (const auto &e : a.mub) {
        c.expect(e.verdict == MubVerdict::Mub, "MUB pair defect " + fmt("%.3g", e.defect));
    }
    std::printf("    value %.15f, %d of 5 seeds close\n", out.best_value, out.seeds_close_to_best);
    return c.failures();
}

int criterion_3(Check &c) {
    auto started = std::chrono::steady_clock::now();
    for (int d = 3; d <= 5; ++d) {
        auto t = unbiased_tensor({2, d, d});
        auto out = perform_seesaw(t, tight(5, 3));
        const double want = 0.5 * (1 + 1 / std::sqrt(static_cast<double>(d)));
        c.near(out.best_value, want, 1e-6, "d = " + std::to_string(d));
        auto a = analyze(out.best_realization.measurements);
        c.expect(!a.mub.empty() && a.mub[0].verdict == MubVerdict::Mub,
                 "MUB at d = " + std::to_string(d) + fmt(", defect %.3g", a.mub.empty() ? -1.0 : a.mub[0].defect));
        std::printf("    d = %d: %.12f (want %.12f), MUB defect %.2e\n", d, out.best_value, want,
                    a.mub.empty() ? -1.0 : a.mub[0].defect);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    c.expect(secs < 300.0, fmt("runtime %.1f s", secs));
    std::printf("    total %.2f s\n", secs);
    return c.failures();
}

int criterion_4(Check &c) {
    const std::vector<double> r{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const double lo = 1.0 / 8;
    const double split = 5.0 / 12;
    double worst_bound = 0.0;
    double worst_classical = 0.0;
    double worst_cos = 0.0;
    for (int i = 0; i < 33; ++i) {
        const double w = lo + (1.0 - lo) * i / 32.0;
        auto t = x_one(3, w, r);
        auto out = perform_seesaw(t, tight(10, 40 + static_cast<std::uint64_t>(i)));
        if (w <= split) {
            const double bound = bound_from_tensor(t);
            c.near(out.best_value, bound, 1e-6, fmt("bound at w = %.5f", w));
            worst_bound = std::max(worst_bound, std::abs(out.best_value - bound));
            auto cos = measurement_cosines(out.best_realization.measurements);
            for (int a = 0; a < 3; ++a) {
                for (int b = a + 1; b < 3; ++b) {
                    const double want = saturating_cosine(t, a, b);
                    c.near(cos(a, b), want, 1e-4, fmt("cosine at w = %.5f", w));
                    worst_cos = std::max(worst_cos, std::abs(cos(a, b) - want));
                }
            }
        }
        if (w >= split) {
            const double classical = perform_search(t).value;
            c.near(out.best_value, classical, 1e-7, fmt("classical at w = %.5f", w));
            worst_classical = std::max(worst_classical, std::abs(out.best_value - classical));
        }
    }
    std::printf("    max |seesaw - bound| %.2e, max |seesaw - classical| %.2e, max cosine error %.2e\n", worst_bound,
                worst_classical, worst_cos);
    return c.failures();
}

int criterion_5(Check &c) {
    const std::vector<double> r{0.5, 0.25, 0.25};
    const double wc = (7 * std::sqrt(3.0) - 9) / 12;
    double first_zero = -1.0;
    double worst = 0.0;
    int points = 0;
    for (int i = 0; i <= 80; ++i) {
        const double w = 0.24 + 5e-4 * i;
        auto t = x_one(3, w, r);
        auto out = perform_seesaw(t, tight(10, 500 + static_cast<std::uint64_t>(i)));
        auto cos = measurement_cosines(out.best_realization.measurements);
        const double theta = std::acos(std::clamp(cos(1, 2), -1.0, 1.0));
        if (first_zero < 0 && theta < 1e-3) {
            first_zero = w;
        }
        if (first_zero >= 0) {
            c.expect(theta < 1e-3, fmt("theta_12 reopened at w = %.5f", w) + fmt(" (%.3g)", theta));
        }
        const double want = w < wc ? bound_from_tensor(t) : theory_value(t).value;
        c.near(out.best_value, want, 1e-6, fmt("value at w = %.5f", w));
        worst = std::max(worst, std::abs(out.best_value - want));
        ++points;
    }
    c.expect(first_zero >= 0 && std::abs(first_zero - wc) <= 1e-3,
             fmt("theta_12 vanishes at %.5f", first_zero) + fmt(", expected %.5f", wc));
    std::printf("    theta_12 vanishes at w = %.5f (expected %.5f), %d points, max value error %.2e\n", first_zero, wc,
                points, worst);
    return c.failures();
}

int criterion_6(Check &c) {
    for (int n = 2; n <= 3; ++n) {
        const double threshold = n == 2 ? 1 / std::sqrt(2.0) : (1 + std::sqrt(3.0) - std::sqrt(2.0)) / 2;
        const double flat = 0.5 * (1 + 1 / std::sqrt(static_cast<double>(n)));
        double worst = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double w = i / 40.0;
            auto t = generate_bias({n, 2, 2}, {BiasFamily::XPlane, {w}, {}, {}});
            auto out = perform_seesaw(t, tight(100, 900 + static_cast<std::uint64_t>(40 * n + i)));
            const double a = std::max(w, 1 - w);
            const double drop = n == 2 ? 0.5 * (1 + a) : (a + 1 + 1 / std::sqrt(2.0)) / 3;
            const double want = a <= threshold ? flat : drop;
            c.near(out.best_value, want, 1e-6, fmt("n = %g", n) + fmt(", w = %.3f", w));
            c.near(x_plane_value(n, w).value, want, 1e-12, fmt("closed form n = %g", n) + fmt(", w = %.3f", w));
            worst = std::max(worst, std::abs(out.best_value - want));
        }
        // Both branches meet at the threshold.
        const double drop_at = n == 2 ? 0.5 * (1 + threshold) : (threshold + 1 + 1 / std::sqrt(2.0)) / 3;
        c.near(drop_at, flat, 1e-14, fmt("branches meet for n = %g", n));
        std::printf("    n = %d: threshold %.6f, max |seesaw - formula| %.2e\n", n, threshold, worst);
    }
    return c.failures();
}

int criterion_7(Check &c) {
    const double lo = (3 - std::sqrt(5.0)) / 4;
    const double hi = (1 + std::sqrt(5.0)) / 4;
    double worst_classical = 0.0;
    double worst_quantum = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double w = i / 40.0;
        auto t = generate_bias({2, 2, 2}, {BiasFamily::BOne, {w}, {}, {}});
        auto out = perform_seesaw(t, tight(12, 1200 + static_cast<std::uint64_t>(i)));
        if (w <= lo || w >= hi) {
            const double classical = perform_search(t).value;
            c.near(out.best_value, classical, 1e-7, fmt("classical region w = %.3f", w));
            worst_classical = std::max(worst_classical, std::abs(out.best_value - classical));
        } else {
            const double mu = w * (1 - w);
            const double want = 0.5 + std::sqrt(1 + 4 * mu) / (8 * std::sqrt(mu));
            c.near(out.best_value, want, 1e-6, fmt("advantage region w = %.3f", w));
            worst_quantum = std::max(worst_quantum, std::abs(out.best_value - want));
        }
    }
    std::printf("    max |seesaw - classical| %.2e, max |seesaw - closed form| %.2e\n", worst_classical,
                worst_quantum);
    return c.failures();
}

int criterion_8(Check &c) {
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double w = i / 20.0;
        auto t = generate_bias({2, 2, 2}, {BiasFamily::XChess, {w}, {}, {}});
        auto out = perform_seesaw(t, tight(10, 1500 + static_cast<std::uint64_t>(i)));
        const double want = 0.5 + 0.5 * std::sqrt(w * w + (1 - w) * (1 - w));
        c.near(out.best_value, want, 1e-6, fmt("n = 2, w = %.2f", w));
        worst = std::max(worst, std::abs(out.best_value - want));
    }
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double w = i / 20.0;
        auto t = generate_bias({3, 2, 2}, {BiasFamily::XChess, {w}, {}, {}});
        auto out = perform_seesaw(t, tight(10, 1600 + static_cast<std::uint64_t>(i)));
        lo = std::min(lo, out.best_value);
        hi = std::max(hi, out.best_value);
    }
    c.expect(hi - lo <= 1e-6, fmt("n = 3 spread %.3g", hi - lo));
    c.near(hi, 0.5 * (1 + 1 / std::sqrt(3.0)), 1e-6, "n = 3 value");
    std::printf("    n = 2 max error %.2e; n = 3 range [%.12f, %.12f]\n", worst, lo, hi);
    return c.failures();
}

int criterion_9(Check &c) {
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (int n = 2; n <= 3; ++n) {
        for (int k = 0; k < 20; ++k) {
            auto t = random_rac_tensor({n, 2, 2}, rng);
            auto cfg = tight(100, 2000 + static_cast<std::uint64_t>(20 * n + k));
            cfg.diagonal = true;
            auto out = perform_seesaw(t, cfg);
            const double classical = perform_search(t).value;
            c.near(out.best_value, classical, 1e-9, "n = " + std::to_string(n) + " tensor " + std::to_string(k));
            worst = std::max(worst, std::abs(out.best_value - classical));
        }
    }
    std::printf("    40 tensors, max |diagonal seesaw - classical| %.2e\n", worst);
    return c.failures();
}

Matrix random_density(int d, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Matrix a(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            a(i, j) = Complex(g(rng), g(rng));
        }
    }
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

int criterion_10(Check &c) {
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<int> dim(2, 4);
    std::uniform_int_distribution<int> outcomes(2, 4);
    std::exponential_distribution<double> expo(1.0);
    double worst_gap = 0.0;
    double worst_helstrom = 0.0;
    int converged = 0;
    int two_outcome = 0;
    for (int k = 0; k < 200; ++k) {
        const int d = dim(rng);
        const int m = outcomes(rng);
        std::vector<double> q(static_cast<std::size_t>(m));
        double total = 0.0;
        for (auto &v : q) {
            v = expo(rng);
            total += v;
        }
        std::vector<Matrix> states;
        for (int b = 0; b < m; ++b) {
            states.push_back(q[static_cast<std::size_t>(b)] / total * random_density(d, rng));
        }
        auto sol = discriminate(states);
        if (!sol.no_convergence) {
            ++converged;
            c.expect(sol.certificate_gap >= -1e-7, "instance " + std::to_string(k) + fmt(" gap %.3g", sol.certificate_gap));
            worst_gap = std::min(worst_gap, sol.certificate_gap);
        }
        if (m == 2) {
            ++two_outcome;
            // Closed form: (tr rho_0 + tr rho_1 + ||rho_0 - rho_1||_1) / 2.
            Eigen::SelfAdjointEigenSolver<Matrix> es(states[0] - states[1]);
            const double closed = 0.5 * (states[0].trace().real() + states[1].trace().real() +
                                         es.eigenvalues().cwiseAbs().sum());
            DiscriminationOptions forced;
            forced.force_iterative = true;
            auto it = discriminate(states, forced);
            c.near(helstrom_two_outcome(states).value, closed, 1e-10, "Helstrom instance " + std::to_string(k));
            c.near(it.value, closed, 1e-10, "iterative instance " + std::to_string(k));
            worst_helstrom = std::max(worst_helstrom, std::abs(it.value - closed));
        }
    }
    std::printf("    %d of 200 converged, worst gap %.2e; %d two-outcome instances, worst iterative error %.2e\n",
                converged, worst_gap, two_outcome, worst_helstrom);
    return c.failures();
}

int criterion_11(Check &c) {
    for (int d = 2; d <= 3; ++d) {
        ScenarioParams p{2, d, d};
        for (int fact = 0; fact <= 1; ++fact) {
            std::mt19937_64 rng(static_cast<std::uint64_t>(1100 + 10 * d + fact));
            int nonprojective = 0;
            int redrawn = 0;
            for (int k = 0; k < 100; ++k) {
                BiasTensor t = unbiased_tensor(p);
                while (true) {
                    t = fact ? random_factorizable_tensor(p, rng) : random_rac_tensor(p, rng);
                    const double r0 = marginals(t).r_y[0];
                    if (r0 > 1e-3 && r0 < 1 - 1e-3) {
                        break;
                    }
                    ++redrawn;
                }
                auto cfg = tight(3, static_cast<std::uint64_t>(5000 + 1000 * d + 500 * fact + k));
                auto out = perform_seesaw(t, cfg);
                auto a = analyze(out.best_realization.measurements);
                if (!a.all_projective()) {
                    ++nonprojective;
                }
            }
            c.expect(nonprojective == 0, "d = " + std::to_string(d) + (fact ? " factorizable" : " full") + ": " +
                                             std::to_string(nonprojective) + " nonprojective");
            std::printf("    d = %d %-12s: nonprojective optima %d of 100 (%d redrawn)\n", d,
                        fact ? "factorizable" : "full", nonprojective, redrawn);
        }
    }
    return c.failures();
}

}  // namespace

int main(int argc, char **argv) {
    // Optional criterion numbers restrict the run.
    std::vector<std::size_t> only;
    for (int i = 1; i < argc; ++i) {
        only.push_back(static_cast<std::size_t>(std::stoul(argv[i])));
    }
    const std::vector<std::pair<const char *, std::function<int(Check &)>>> criteria{
        {"classical table rows", criterion_1},
        {"unbiased 2^2 see-saw", criterion_2},
        {"unbiased 2^d see-saw, d = 3..5", criterion_3},
        {"X_ONE n = 3 uniform r sweep", criterion_4},
        {"X_ONE n = 3 angle closing", criterion_5},
        {"X_PLANE thresholds", criterion_6},
        {"B_ONE 2^2", criterion_7},
        {"X_CHESS n = 2, 3", criterion_8},
        {"diagonal see-saw = classical", criterion_9},
        {"discrimination certificates", criterion_10},
        {"random biases give projective optima", criterion_11},
    };
    int failed = 0;
    int ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && std::find(only.begin(), only.end(), i + 1) == only.end()) {
            continue;
        }
        ++ran;
        Check c;
        auto started = std::chrono::steady_clock::now();
        try {
            criteria[i].second(c);
        } catch (const std::exception &e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::printf("%s criterion %zu: %s (%.1f s)\n", c.failures() == 0 ? "PASS" : "FAIL", i + 1,
                    criteria[i].first, secs);
        std::fflush(stdout);
        failed += c.failures() == 0 ? 0 : 1;
    }
    std::printf("%d of %d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
