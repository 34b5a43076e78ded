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

#include "racforge/cli.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "racforge/analysis.h"
#include "racforge/classical_search.h"
#include "racforge/error.h"
#include "racforge/seesaw.h"
#include "racforge/serialization.h"
#include "racforge/theory.h"

namespace racforge {

namespace {

struct SearchFlags {
    int method = 2;
    std::uint64_t limit = 1'000'000'000ULL;
    int threads = 1;
};

struct SeesawFlags {
    int seeds = 1;
    bool diagonal = false;
    double prob_bound = 1e-9;
    double meas_bound = 1e-7;
    int max_iterations = 200;
    std::uint64_t rng_seed = 0;
    int threads = 1;
    bool strict = false;
};

struct SweepFlags {
    double start = 0.0;
    double stop = 1.0;
    int points = 11;
    std::vector<std::string> engines{"classical", "seesaw", "theory"};
    std::string csv;
    int random_samples = 0;
    std::string ensemble = "both";
    double exclude = 1e-3;
    int threads = 1;
};

struct OutputFlags {
    std::string json;
    bool quiet = false;
};

void add_bias_flags(CLI::App *cmd, BiasOptions &b) {
    cmd->add_option("--n", b.n, "number of characters")->check(CLI::Range(2, 64));
    cmd->add_option("--d", b.d, "message dimension")->check(CLI::Range(2, 64));
    cmd->add_option("--m", b.m, "alphabet size (defaults to d)")->check(CLI::Range(2, 36));
    cmd->add_option("--bias", b.family, "bias family (Y_ONE, Y_ALL, X_ONE, X_DIAG, X_CHESS, X_PLANE, B_ONE, B_ALL)");
    cmd->add_option("--weight,--weights", b.weights, "family weight(s)")->delimiter(',');
    cmd->add_option("--y-weights", b.y_weights, "question distribution for string families")->delimiter(',');
    cmd->add_option("--bias-file", b.bias_file, "JSON bias tensor");
    cmd->add_flag("--renormalize", b.renormalize, "rescale input weights to sum to one");
}

void add_output_flags(CLI::App *cmd, OutputFlags &o) {
    cmd->add_option("--json", o.json, "write the JSON record to this path");
    cmd->add_flag("--quiet", o.quiet, "suppress the text report");
}

void add_seesaw_flags(CLI::App *cmd, SeesawFlags &s, bool seeds_required) {
    auto *seeds = cmd->add_option("--seeds", s.seeds, "number of random seeds")->check(CLI::PositiveNumber);
    if (seeds_required) {
        seeds->required();
    }
    cmd->add_flag("--diagonal", s.diagonal, "restrict to diagonal states and measurements");
    cmd->add_option("--prob-bound", s.prob_bound, "value change threshold")->check(CLI::PositiveNumber);
    cmd->add_option("--meas-bound", s.meas_bound, "measurement change threshold")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iterations", s.max_iterations, "iteration cap per seed")->check(CLI::PositiveNumber);
    cmd->add_option("--rng-seed", s.rng_seed, "base random seed");
}

SeesawConfig seesaw_config(const SeesawFlags &s, int threads) {
    SeesawConfig cfg;
    cfg.seeds = s.seeds;
    cfg.diagonal = s.diagonal;
    cfg.prob_bound = s.prob_bound;
    cfg.meas_bound = s.meas_bound;
    cfg.max_iterations = s.max_iterations;
    cfg.rng_seed = s.rng_seed;
    cfg.threads = threads;
    return cfg;
}

int hardware_threads() {
    return std::max(1U, std::thread::hardware_concurrency());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_cell(const std::optional<double> &v) {
    return v ? fmt(*v) : "";
}

void emit_json(const OutputFlags &o, const nlohmann::json &doc) {
    if (!o.json.empty()) {
        write_json_file(o.json, doc);
    }
}

// Runs body(i) for i in [0, count) on up to `threads` workers.
template <class Body>
void parallel_for(int count, int threads, Body body) {
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            body(i);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min(threads, count); ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }
}

int cmd_search(const BiasOptions &b, const SearchFlags &s, const OutputFlags &o, std::ostream &out) {
    auto t = build_bias(b);
    SearchOptions opts;
    if (s.method < 0 || s.method > 2) {
        throw Error(ErrorCode::ParseError, "--method must be 0, 1 or 2");
    }
    opts.method = static_cast<SearchMethod>(s.method);
    opts.limit = s.limit;
    opts.threads = s.threads;
    auto result = perform_search(t, opts);
    auto rep = render_search_report(t, result, !o.quiet);
    rep.record["bias"] = bias_to_json(t);
    out << rep.text;
    emit_json(o, rep.record);
    return kExitOk;
}

int cmd_seesaw(const BiasOptions &b, const SeesawFlags &s, const OutputFlags &o, std::ostream &out,
               std::ostream &err) {
    auto t = build_bias(b);
    auto cfg = seesaw_config(s, s.threads);
    auto outcome = perform_seesaw(t, cfg);
    auto analysis = analyze(outcome.best_realization.measurements);
    auto rep = render_seesaw_report(t, cfg, outcome, analysis, !o.quiet);
    rep.record["bias"] = bias_to_json(t);
    rep.record["realization"] = realization_to_json(outcome.best_realization);
    out << rep.text;
    emit_json(o, rep.record);
    bool flagged = std::any_of(outcome.per_seed.begin(), outcome.per_seed.end(),
                               [](const SeedResult &r) { return r.no_convergence; });
    if (flagged) {
        err << "warning: a measurement step did not reach its optimality certificate\n";
        if (s.strict) {
            return kExitNoConvergence;
        }
    }
    return kExitOk;
}

int cmd_bound(const BiasOptions &b, const OutputFlags &o, std::ostream &out) {
    auto t = build_bias(b);
    auto result = theory_value(t);
    nlohmann::json doc = {{"schema", kSchemaTag}, {"kind", "bound"}, {"n", t.params().n},
                          {"m", t.params().m},    {"d", t.params().d},   {"result", theory_to_json(result)}};
    const auto &p = t.params();
    if (p.n == 2 && p.m == p.d && p.d >= 3) {
        auto f = is_factorizable(t, 1e-10);
        auto att = attainability_2d(f.alpha_x, f.r_y[0], f.r_y[1]);
        doc["necessary_conditions"] = {{"verdict", std::string(necessary_conditions_name(att.verdict))},
                                       {"c_squared", att.c_squared},
                                       {"ranks", att.ranks},
                                       {"ranks_feasible", att.ranks_feasible},
                                       {"b_feasible", att.b_feasible}};
    }
    if (!o.quiet) {
        out << doc.dump(2) << "\n";
    }
    emit_json(o, doc);
    return kExitOk;
}

struct SweepRow {
    double weight = 0.0;
    std::optional<double> classical;
    std::optional<double> seesaw;
    std::optional<double> theory_bound;
    std::optional<double> theory_exact;
    std::string attained;
    Eigen::MatrixXd cosines;
    std::vector<std::string> warnings;
    double seconds = 0.0;
};

bool has_engine(const SweepFlags &f, std::string_view name) {
    return std::find(f.engines.begin(), f.engines.end(), name) != f.engines.end();
}

SweepRow sweep_row(const BiasOptions &b, const SeesawFlags &s, const SweepFlags &f, double w) {
    SweepRow row;
    row.weight = w;
    auto start = std::chrono::steady_clock::now();
    try {
        auto t = build_bias(b, w);
        if (has_engine(f, "classical")) {
            try {
                row.classical = perform_search(t).value;
            } catch (const Error &e) {
                row.warnings.push_back(std::string("classical: ") + e.what());
            }
        }
        if (has_engine(f, "seesaw")) {
            auto outcome = perform_seesaw(t, seesaw_config(s, 1));
            row.seesaw = outcome.best_value;
            if (t.params().m == 2) {
                row.cosines = measurement_cosines(outcome.best_realization.measurements);
            }
            for (const auto &seed : outcome.per_seed) {
                if (seed.no_convergence) {
                    row.warnings.emplace_back("seesaw: certificate not reached");
                    break;
                }
            }
        }
        if (has_engine(f, "theory")) {
            try {
                auto th = theory_value(t);
                row.theory_bound = th.value;
                row.attained = std::string(attainment_name(th.attained));
                if (th.kind == ResultKind::Exact) {
                    row.theory_exact = th.value;
                }
            } catch (const Error &e) {
                row.warnings.push_back(std::string("theory: ") + e.what());
            }
        }
    } catch (const Error &e) {
        row.warnings.emplace_back(e.what());
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

std::string join_warnings(const std::vector<std::string> &w) {
    std::string s;
    for (const auto &item : w) {
        s += (s.empty() ? "" : " | ") + item;
    }
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

int sweep_grid(const BiasOptions &b, const SeesawFlags &s, const SweepFlags &f, const OutputFlags &o,
               std::ostream &out, std::ostream &err) {
    if (f.points < 2) {
        throw Error(ErrorCode::ParseError, "--points must be at least 2");
    }
    if (b.family.empty() || !b.bias_file.empty()) {
        throw Error(ErrorCode::ParseError, "a sweep needs --bias with a scalar family");
    }
    std::vector<SweepRow> rows(static_cast<std::size_t>(f.points));
    parallel_for(f.points, f.threads, [&](int i) {
        double w = f.start + (f.stop - f.start) * i / (f.points - 1);
        rows[static_cast<std::size_t>(i)] = sweep_row(b, s, f, w);
    });

    std::ostringstream csv;
    csv << "weight,classical,seesaw,theory_bound,theory_exact,attained";
    for (int i = 0; i < b.n; ++i) {
        for (int j = i + 1; j < b.n; ++j) {
            csv << ",cos_" << i << "_" << j << ",angle_" << i << "_" << j;
        }
    }
    csv << ",seconds,warnings\n";
    auto doc_rows = nlohmann::json::array();
    int failures = 0;
    for (const auto &r : rows) {
        csv << fmt(r.weight) << "," << csv_cell(r.classical) << "," << csv_cell(r.seesaw) << ","
            << csv_cell(r.theory_bound) << "," << csv_cell(r.theory_exact) << "," << r.attained;
        nlohmann::json cos = nlohmann::json::array();
        for (int i = 0; i < b.n; ++i) {
            for (int j = i + 1; j < b.n; ++j) {
                if (r.cosines.rows() == b.n && std::isfinite(r.cosines(i, j))) {
                    double c = std::clamp(r.cosines(i, j), -1.0, 1.0);
                    csv << "," << fmt(c) << "," << fmt(std::acos(c));
                    cos.push_back(c);
                } else {
                    csv << ",,";
                    cos.push_back(nullptr);
                }
            }
        }
        csv << "," << fmt(r.seconds) << "," << join_warnings(r.warnings) << "\n";
        if (!r.warnings.empty()) {
            ++failures;
            err << "warning at weight " << fmt(r.weight) << ": " << join_warnings(r.warnings) << "\n";
        }
        doc_rows.push_back({{"weight", r.weight},
                            {"classical", r.classical ? nlohmann::json(*r.classical) : nlohmann::json()},
                            {"seesaw", r.seesaw ? nlohmann::json(*r.seesaw) : nlohmann::json()},
                            {"theory_bound", r.theory_bound ? nlohmann::json(*r.theory_bound) : nlohmann::json()},
                            {"theory_exact", r.theory_exact ? nlohmann::json(*r.theory_exact) : nlohmann::json()},
                            {"attained", r.attained},
                            {"cosines", cos},
                            {"seconds", r.seconds},
                            {"warnings", r.warnings}});
    }
    if (f.csv.empty()) {
        if (!o.quiet) {
            out << csv.str();
        }
    } else {
        std::ofstream file(f.csv);
        if (!file) {
            throw Error(ErrorCode::ParseError, "cannot write " + f.csv);
        }
        file << csv.str();
    }
    emit_json(o, {{"schema", kSchemaTag},
                  {"kind", "sweep"},
                  {"family", b.family},
                  {"n", b.n},
                  {"d", b.d},
                  {"m", b.m.value_or(b.d)},
                  {"rng_seed", s.rng_seed},
                  {"seeds", s.seeds},
                  {"rows", doc_rows},
                  {"rows_with_warnings", failures}});
    return kExitOk;
}

bool near_deterministic(const BiasTensor &t, double exclude) {
    auto r = marginals(t).r_y;
    return std::any_of(r.begin(), r.end(), [&](double v) { return v < exclude || v > 1.0 - exclude; });
}

// Random bias study on 2^d --> 1: draws tensors, runs the see-saw and checks
// projectiveness of the best realization.
int sweep_random(const BiasOptions &b, const SeesawFlags &s, const SweepFlags &f, const OutputFlags &o,
                 std::ostream &out, std::ostream &err) {
    ScenarioParams params{b.n, b.m.value_or(b.d), b.d};
    params.validate();
    std::vector<std::string> ensembles;
    if (f.ensemble == "both" || f.ensemble == "full") {
        ensembles.emplace_back("full");
    }
    if (f.ensemble == "both" || f.ensemble == "factorizable") {
        ensembles.emplace_back("factorizable");
    }
    if (ensembles.empty()) {
        throw Error(ErrorCode::ParseError, "--ensemble must be full, factorizable or both");
    }
    struct Sample {
        std::string ensemble;
        int index = 0;
        double value = 0.0;
        bool projective = false;
        double max_defect = 0.0;
        bool no_convergence = false;
        double seconds = 0.0;
    };
    const int total = f.random_samples * static_cast<int>(ensembles.size());
    std::vector<Sample> samples(static_cast<std::size_t>(total));
    parallel_for(total, f.threads, [&](int k) {
        Sample smp;
        smp.ensemble = ensembles[static_cast<std::size_t>(k / f.random_samples)];
        smp.index = k % f.random_samples;
        const bool fact = smp.ensemble == "factorizable";
        std::seed_seq seq{static_cast<std::uint32_t>(s.rng_seed), static_cast<std::uint32_t>(s.rng_seed >> 32),
                          static_cast<std::uint32_t>(smp.index), static_cast<std::uint32_t>(fact)};
        std::mt19937_64 rng(seq);
        auto draw = [&] { return fact ? random_factorizable_tensor(params, rng) : random_rac_tensor(params, rng); };
        auto t = draw();
        while (fact && near_deterministic(t, f.exclude)) {
            t = draw();
        }
        auto cfg = seesaw_config(s, 1);
        cfg.rng_seed = s.rng_seed + static_cast<std::uint64_t>(k);
        auto outcome = perform_seesaw(t, cfg);
        auto analysis = analyze(outcome.best_realization.measurements);
        smp.value = outcome.best_value;
        smp.projective = analysis.all_projective();
        for (const auto &row : analysis.projectiveness_defect) {
            for (double v : row) {
                smp.max_defect = std::max(smp.max_defect, v);
            }
        }
        smp.no_convergence = std::any_of(outcome.per_seed.begin(), outcome.per_seed.end(),
                                         [](const SeedResult &r) { return r.no_convergence; });
        smp.seconds = outcome.elapsed_seconds;
        samples[static_cast<std::size_t>(k)] = smp;
    });
    std::ostringstream csv;
    csv << "ensemble,sample,value,projective,max_projectiveness_defect,no_convergence,seconds\n";
    int nonprojective = 0;
    auto doc_rows = nlohmann::json::array();
    for (const auto &smp : samples) {
        nonprojective += smp.projective ? 0 : 1;
        csv << smp.ensemble << "," << smp.index << "," << fmt(smp.value) << "," << smp.projective << ","
            << fmt(smp.max_defect) << "," << smp.no_convergence << "," << fmt(smp.seconds) << "\n";
        doc_rows.push_back({{"ensemble", smp.ensemble},
                            {"sample", smp.index},
                            {"value", smp.value},
                            {"projective", smp.projective},
                            {"max_projectiveness_defect", smp.max_defect},
                            {"no_convergence", smp.no_convergence}});
    }
    if (f.csv.empty()) {
        if (!o.quiet) {
            out << csv.str();
        }
    } else {
        std::ofstream file(f.csv);
        file << csv.str();
    }
    err << "nonprojective optima: " << nonprojective << " of " << total << "\n";
    emit_json(o, {{"schema", kSchemaTag},
                  {"kind", "random_study"},
                  {"n", params.n},
                  {"m", params.m},
                  {"d", params.d},
                  {"seeds", s.seeds},
                  {"rng_seed", s.rng_seed},
                  {"samples", doc_rows},
                  {"nonprojective", nonprojective}});
    return kExitOk;
}

}  // namespace

BiasTensor build_bias(const BiasOptions &opts, std::optional<double> weight) {
    if (!opts.bias_file.empty()) {
        auto t = bias_from_json(read_json_file(opts.bias_file), opts.renormalize);
        return t;
    }
    ScenarioParams params{opts.n, opts.m.value_or(opts.d), opts.d};
    params.validate();
    if (opts.family.empty()) {
        if (!opts.weights.empty() || !opts.y_weights.empty() || weight) {
            throw Error(ErrorCode::ParseError, "weights given without --bias");
        }
        return unbiased_tensor(params);
    }
    BiasSpec spec;
    spec.family = parse_family(opts.family);
    spec.weights = weight ? std::vector<double>{*weight} : opts.weights;
    if (!opts.y_weights.empty()) {
        spec.y_weights = opts.y_weights;
    }
    return generate_bias(params, spec);
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Classical and quantum values of biased random access codes", "rac-forge"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rac-forge 0.1.0");

    BiasOptions bias;
    SearchFlags search;
    SeesawFlags seesaw;
    SweepFlags sweep;
    OutputFlags output;

    auto *search_cmd = app.add_subcommand("search", "exhaustive classical value");
    add_bias_flags(search_cmd, bias);
    add_output_flags(search_cmd, output);
    search_cmd->add_option("--method", search.method, "0: all pairs, 1: encodings, 2: decodings")
        ->check(CLI::Range(0, 2));
    search_cmd->add_option("--limit", search.limit, "maximum number of scanned functions");
    search_cmd->add_option("--threads", search.threads, "worker threads")->check(CLI::PositiveNumber);

    auto *seesaw_cmd = app.add_subcommand("seesaw", "see-saw lower bound on the quantum value");
    add_bias_flags(seesaw_cmd, bias);
    add_output_flags(seesaw_cmd, output);
    add_seesaw_flags(seesaw_cmd, seesaw, true);
    seesaw_cmd->add_option("--threads", seesaw.threads, "worker threads over seeds")->check(CLI::PositiveNumber);
    seesaw_cmd->add_flag("--strict", seesaw.strict, "exit with code 3 when a certificate is not reached");

    auto *bound_cmd = app.add_subcommand("bound", "analytic values and bounds");
    add_bias_flags(bound_cmd, bias);
    add_output_flags(bound_cmd, output);

    auto *sweep_cmd = app.add_subcommand("sweep", "scan a family weight, or run a random bias study");
    add_bias_flags(sweep_cmd, bias);
    add_output_flags(sweep_cmd, output);
    add_seesaw_flags(sweep_cmd, seesaw, false);
    sweep.threads = hardware_threads();
    sweep_cmd->add_option("--threads", sweep.threads, "worker threads over rows")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--start", sweep.start, "first weight");
    sweep_cmd->add_option("--stop", sweep.stop, "last weight");
    sweep_cmd->add_option("--points", sweep.points, "grid points")->check(CLI::Range(2, 100000));
    sweep_cmd->add_option("--engines", sweep.engines, "classical,seesaw,theory")
        ->delimiter(',')
        ->check(CLI::IsMember({"classical", "seesaw", "theory"}));
    sweep_cmd->add_option("--csv", sweep.csv, "write the CSV here instead of stdout");
    sweep_cmd->add_option("--random-samples", sweep.random_samples, "random bias study with this many draws")
        ->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--ensemble", sweep.ensemble, "full, factorizable or both")
        ->check(CLI::IsMember({"full", "factorizable", "both"}));
    sweep_cmd->add_option("--exclude", sweep.exclude, "skip factorizable draws with some r_y this close to 0 or 1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err);
    }
    try {
        if (search_cmd->parsed()) {
            return cmd_search(bias, search, output, out);
        }
        if (seesaw_cmd->parsed()) {
            return cmd_seesaw(bias, seesaw, output, out, err);
        }
        if (bound_cmd->parsed()) {
            return cmd_bound(bias, output, out);
        }
        if (sweep.random_samples > 0) {
            return sweep_random(bias, seesaw, sweep, output, out, err);
        }
        return sweep_grid(bias, seesaw, sweep, output, out, err);
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        switch (e.code()) {
            case ErrorCode::SearchTooLarge:
                return kExitSearchTooLarge;
            case ErrorCode::NoConvergence:
                return kExitNoConvergence;
            case ErrorCode::OutOfTheoryScope:
                return kExitOutOfTheoryScope;
            default:
                return kExitFailure;
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace racforge
