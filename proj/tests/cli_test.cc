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
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "racforge/cli.h"
#include "racforge/serialization.h"
#include "racforge/theory.h"

namespace racforge {
namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "rac-forge");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("rac_forge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override {
        std::filesystem::remove_all(dir_);
    }
    std::string path(const std::string &name) const {
        return (dir_ / name).string();
    }
    std::filesystem::path dir_;
};

TEST_F(CliTest, SearchUnbiasedTwoBit) {
    auto r = run({"search", "--n", "2", "--d", "2", "--method", "0", "--json", path("s.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("Number of functions achieving the computed value: 24"), std::string::npos);
    auto doc = read_json_file(path("s.json"));
    EXPECT_EQ(doc["value"], 0.75);
    EXPECT_EQ(doc["optimum_count"], 24);
    EXPECT_EQ(doc["functions_scanned"], 256);
}

TEST_F(CliTest, SearchTableRowsNeedBinaryAlphabet) {
    auto a = run({"search", "--n", "3", "--d", "3", "--m", "2", "--quiet", "--json", path("a.json")});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_TRUE(a.out.empty());
    EXPECT_NEAR(read_json_file(path("a.json"))["value"].get<double>(), 19.0 / 24, 1e-15);
    auto b = run({"search", "--n", "2", "--d", "4", "--m", "2", "--json", path("b.json")});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(read_json_file(path("b.json"))["value"], 1.0);
}

TEST_F(CliTest, SearchTooLarge) {
    // Enumerating encodings for 3^3 --> 1 means 3^27 candidates.
    auto r = run({"search", "--n", "3", "--d", "3", "--method", "1"});
    EXPECT_EQ(r.code, kExitSearchTooLarge);
    EXPECT_NE(r.err.find("SearchTooLarge"), std::string::npos);
}

TEST_F(CliTest, SeesawUnbiasedAndRoundTrip) {
    auto r = run({"seesaw", "--n", "2", "--d", "2", "--seeds", "5", "--json", path("q.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("0.853553390593"), std::string::npos);
    EXPECT_NE(r.out.find("MUB"), std::string::npos);
    auto doc = read_json_file(path("q.json"));
    EXPECT_NEAR(doc["value"].get<double>(), 0.853553390593, 1e-9);
    EXPECT_EQ(doc["mub"][0]["verdict"], "MUB");
    auto t = bias_from_json(doc["bias"]);
    auto real = realization_from_json(doc["realization"]);
    EXPECT_NEAR(functional_value(t, real), doc["value"].get<double>(), 1e-12);
}

TEST_F(CliTest, SeesawDiagonal) {
    auto r = run({"seesaw", "--n", "2", "--d", "2", "--seeds", "5", "--diagonal", "--quiet", "--json",
                  path("c.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(read_json_file(path("c.json"))["value"].get<double>(), 0.75, 1e-9);
}

TEST_F(CliTest, SeesawHighDimensionMatchesBound) {
    auto r = run({"seesaw", "--n", "2", "--d", "5", "--seeds", "3", "--bias", "Y_ONE", "--weight", "0.5", "--quiet",
                  "--json", path("d.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::vector<double> a(25, 1.0 / 25);
    EXPECT_NEAR(read_json_file(path("d.json"))["value"].get<double>(), upper_bound_2d(a, 0.5, 0.5), 1e-6);
}

TEST_F(CliTest, SeesawRequiresSeeds) {
    EXPECT_NE(run({"seesaw", "--n", "2", "--d", "2"}).code, 0);
}

TEST_F(CliTest, BoundExamples) {
    auto a = run({"bound", "--n", "2", "--d", "2"});
    ASSERT_EQ(a.code, 0) << a.err;
    auto da = nlohmann::json::parse(a.out);
    EXPECT_NEAR(da["result"]["value"].get<double>(), 0.8535533906, 1e-10);
    EXPECT_EQ(da["result"]["attained"], "attained");

    auto b = run({"bound", "--n", "3", "--d", "2", "--bias", "X_ONE", "--weight", "0.2"});
    ASSERT_EQ(b.code, 0) << b.err;
    auto cos = nlohmann::json::parse(b.out)["result"]["gram"]["cosines"];
    const double w = 0.2;
    const double h = (32 * w * w + 20 * w - 3) / (48 * w * w - 12 * w + 13);
    EXPECT_NEAR(cos[0][1].get<double>(), 1.5 * h, 1e-12);
    EXPECT_NEAR(cos[0][2].get<double>(), 1.5 * h, 1e-12);
    EXPECT_NEAR(cos[1][2].get<double>(), 1.5 * h, 1e-12);

    auto c = run({"bound", "--n", "4", "--d", "2", "--bias", "Y_ONE", "--weight", "0.25"});
    ASSERT_EQ(c.code, 0) << c.err;
    auto dc = nlohmann::json::parse(c.out)["result"];
    EXPECT_EQ(dc["attained"], "not_attained");
    EXPECT_EQ(dc["kind"], "upper_bound");
}

TEST_F(CliTest, BoundOutOfScope) {
    auto r = run({"bound", "--n", "3", "--d", "3"});
    EXPECT_EQ(r.code, kExitOutOfTheoryScope);
    EXPECT_NE(r.err.find("3^3-->1"), std::string::npos);
}

TEST_F(CliTest, BiasFile) {
    {
        std::ofstream f(path("bias.json"));
        f << R"({"n": 2, "m": 2, "d": 2, "entries": {"00:0:0": 0.25, "01:0:0": 0.25, "10:1:0": 0.25, "11:1:1": 0.25}})";
    }
    auto r = run({"search", "--bias-file", path("bias.json"), "--quiet", "--json", path("r.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_json_file(path("r.json"))["value"], 1.0);
    auto bad = run({"search", "--bias-file", path("missing.json")});
    EXPECT_EQ(bad.code, kExitFailure);
}

TEST_F(CliTest, SweepIsDeterministic) {
    std::vector<std::string> args{"sweep",  "--n",     "3",     "--d",      "2",     "--bias",
                                  "X_ONE",  "--start", "0.125", "--stop",   "0.5",   "--points",
                                  "4",      "--seeds", "3",     "--rng-seed", "9",   "--threads", "2"};
    auto a = run(args);
    auto b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    std::istringstream ia(a.out);
    std::istringstream ib(b.out);
    std::string la;
    std::string lb;
    std::getline(ia, la);
    EXPECT_EQ(la.rfind("weight,classical,seesaw,theory_bound,theory_exact,attained,cos_0_1,angle_0_1", 0), 0U);
    std::getline(ib, lb);
    int rows = 0;
    auto strip_time = [](std::string s) {
        // Drop the trailing seconds,warnings columns.
        for (int k = 0; k < 2; ++k) {
            s = s.substr(0, s.rfind(','));
        }
        return s;
    };
    while (std::getline(ia, la) && std::getline(ib, lb)) {
        EXPECT_EQ(strip_time(la), strip_time(lb));
        ++rows;
    }
    EXPECT_EQ(rows, 4);
}

TEST_F(CliTest, SweepRecordsPartialFailures) {
    auto r = run({"sweep", "--n", "3", "--d", "3", "--m", "3", "--bias", "X_ONE", "--points", "2", "--seeds", "1",
                  "--engines", "theory", "--json", path("s.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_EQ(read_json_file(path("s.json"))["rows_with_warnings"], 2);
}

TEST_F(CliTest, RandomStudy) {
    auto r = run({"sweep", "--n", "2", "--d", "2", "--random-samples", "3", "--seeds", "2", "--json",
                  path("r.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = read_json_file(path("r.json"));
    EXPECT_EQ(doc["samples"].size(), 6U);
    EXPECT_EQ(doc["nonprojective"], 0);
}

}  // namespace
}  // namespace racforge
