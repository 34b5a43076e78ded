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

#include "racforge/serialization.h"

#include <fstream>
#include <sstream>

#include "racforge/error.h"

namespace racforge {

namespace {

[[noreturn]] void parse_fail(const std::string &what) {
    throw Error(ErrorCode::ParseError, what);
}

int parse_int(std::string_view s, const std::string &key) {
    int v = 0;
    std::istringstream is{std::string(s)};
    if (s.empty() || !(is >> v) || !is.eof()) {
        parse_fail("bad integer in entry key '" + key + "'");
    }
    return v;
}

nlohmann::json real_rows(const Eigen::MatrixXd &m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::json bias_to_json(const BiasTensor &t) {
    const auto &p = t.params();
    nlohmann::json entries = nlohmann::json::object();
    for (std::size_t x = 0; x < p.num_strings(); ++x) {
        for (int y = 0; y < p.n; ++y) {
            for (int b = 0; b < p.m; ++b) {
                if (t(x, y, b) != 0.0) {
                    entries[p.string_label(x) + ":" + std::to_string(y) + ":" + std::to_string(b)] = t(x, y, b);
                }
            }
        }
    }
    return {{"schema", kSchemaTag}, {"n", p.n}, {"m", p.m}, {"d", p.d}, {"entries", entries}};
}

BiasTensor bias_from_json(const nlohmann::json &doc, bool renormalize) {
    ScenarioParams p;
    try {
        p.n = doc.at("n").get<int>();
        p.m = doc.at("m").get<int>();
        p.d = doc.at("d").get<int>();
    } catch (const nlohmann::json::exception &e) {
        parse_fail(std::string("bias file needs integer n, m, d: ") + e.what());
    }
    p.validate();
    if (!doc.contains("entries") || !doc["entries"].is_object()) {
        parse_fail("bias file needs an 'entries' object");
    }
    std::vector<double> entries(p.num_strings() * static_cast<std::size_t>(p.n * p.m), 0.0);
    for (const auto &[key, value] : doc["entries"].items()) {
        auto c1 = key.find(':');
        auto c2 = key.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            parse_fail("entry key '" + key + "' is not <x>:<y>:<b>");
        }
        auto x = p.parse_string(std::string_view(key).substr(0, c1));
        int y = parse_int(std::string_view(key).substr(c1 + 1, c2 - c1 - 1), key);
        int b = parse_int(std::string_view(key).substr(c2 + 1), key);
        if (!x || y < 0 || y >= p.n || b < 0 || b >= p.m) {
            parse_fail("entry key '" + key + "' is out of range");
        }
        if (!value.is_number()) {
            parse_fail("entry '" + key + "' is not a number");
        }
        entries[(*x * p.n + y) * p.m + b] = value.get<double>();
    }
    return BiasTensor::from_entries(p, std::move(entries), renormalize);
}

nlohmann::json matrix_to_json(const Matrix &m) {
    return {{"re", real_rows(m.real())}, {"im", real_rows(m.imag())}};
}

Matrix matrix_from_json(const nlohmann::json &doc) {
    try {
        const auto &re = doc.at("re");
        const auto &im = doc.at("im");
        const auto rows = static_cast<Eigen::Index>(re.size());
        const auto cols = rows ? static_cast<Eigen::Index>(re.at(0).size()) : 0;
        if (im.size() != re.size()) {
            parse_fail("re/im row counts differ");
        }
        Matrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const auto &rr = re.at(static_cast<std::size_t>(i));
            const auto &ir = im.at(static_cast<std::size_t>(i));
            if (static_cast<Eigen::Index>(rr.size()) != cols || static_cast<Eigen::Index>(ir.size()) != cols) {
                parse_fail("ragged matrix");
            }
            for (Eigen::Index j = 0; j < cols; ++j) {
                m(i, j) = {rr.at(static_cast<std::size_t>(j)).get<double>(),
                           ir.at(static_cast<std::size_t>(j)).get<double>()};
            }
        }
        return m;
    } catch (const nlohmann::json::exception &e) {
        parse_fail(std::string("bad matrix: ") + e.what());
    }
}

nlohmann::json realization_to_json(const QuantumRealization &r) {
    auto states = nlohmann::json::array();
    for (const auto &psi : r.preparations) {
        states.push_back(matrix_to_json(psi));
    }
    auto meas = nlohmann::json::array();
    for (const auto &povm : r.measurements) {
        auto ops = nlohmann::json::array();
        for (const auto &op : povm.outcomes) {
            ops.push_back(matrix_to_json(op));
        }
        meas.push_back(std::move(ops));
    }
    return {{"states", states}, {"measurements", meas}};
}

QuantumRealization realization_from_json(const nlohmann::json &doc) {
    QuantumRealization r;
    if (!doc.contains("states") || !doc.contains("measurements")) {
        parse_fail("realization needs 'states' and 'measurements'");
    }
    for (const auto &s : doc["states"]) {
        Matrix m = matrix_from_json(s);
        if (m.cols() != 1) {
            parse_fail("states must be column vectors");
        }
        r.preparations.emplace_back(m.col(0));
    }
    for (const auto &ops : doc["measurements"]) {
        Povm povm;
        for (const auto &op : ops) {
            povm.outcomes.push_back(matrix_from_json(op));
        }
        r.measurements.push_back(std::move(povm));
    }
    return r;
}

nlohmann::json theory_to_json(const TheoryResult &r) {
    nlohmann::json out = {{"value", r.value},
                          {"kind", std::string(result_kind_name(r.kind))},
                          {"attained", std::string(attainment_name(r.attained))},
                          {"note", r.note}};
    if (r.drop_set) {
        out["drop_set"] = *r.drop_set;
    }
    if (r.gram) {
        out["gram"] = {{"cosines", real_rows(r.gram->cosines)},
                       {"gtilde", real_rows(r.gram->gtilde)},
                       {"in_range", r.gram->in_range},
                       {"psd", r.gram->psd},
                       {"min_eigenvalue", r.gram->min_eigenvalue},
                       {"rank", r.gram->rank}};
    }
    return out;
}

nlohmann::json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        parse_fail("cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        parse_fail(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path &path, const nlohmann::json &doc) {
    std::ofstream out(path);
    if (!out) {
        parse_fail("cannot write " + path.string());
    }
    out << doc.dump(2) << "\n";
}

}  // namespace racforge
