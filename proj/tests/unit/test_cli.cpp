// SPDX-License-Identifier: Apache-2.0
//
// fdisac: full-duplex ISAC simulator with movable antennas
// Copyright (C) 2026 The fdisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "fdisac");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = fdisac::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

struct Workdir {
    fs::path root;
    fs::path config;

    explicit Workdir(const std::string& name, const std::string& json) {
        root = fs::temp_directory_path() / name;
        fs::remove_all(root);
        fs::create_directories(root);
        config = root / "config.json";
        std::ofstream(config) << json;
    }
    ~Workdir() { fs::remove_all(root); }
};

const char* kSmall = R"({"gml": {"n_e": 3}, "nlp": {"restarts": 1, "steps_per_stage": 20},
  "sweep": {"parameter": "p_bs", "values": [0.5, 2.0], "realizations": 2}})";

std::set<fs::path> listing(const fs::path& dir) {
    std::set<fs::path> s;
    for (const auto& e : fs::recursive_directory_iterator(dir)) s.insert(e.path());
    return s;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(call({}).code == fdisac::cli::kUsage);
    CHECK(call({"bogus"}).code == fdisac::cli::kUsage);
    CHECK(call({"run"}).code == fdisac::cli::kUsage);
    CHECK(call({"run", "--config", "/nonexistent/config.json"}).code == fdisac::cli::kUsage);
    CHECK(call({"--help"}).code == fdisac::cli::kOk);
}

TEST_CASE("validate prints the effective config") {
    const Result r = call({"validate"});
    CHECK(r.code == fdisac::cli::kOk);
    CHECK(r.out.find("\"scenario\"") != std::string::npos);
    Workdir w("fdisac_cli_validate", R"({"scenario": {"n_t": 0}})");
    CHECK(call({"validate", "--config", w.config.string()}).code == fdisac::cli::kUsage);
    Workdir typo("fdisac_cli_typo", R"({"scenaro": {}})");
    CHECK(call({"validate", "--config", typo.config.string()}).code == fdisac::cli::kUsage);
}

TEST_CASE("sweep output is byte-identical for a fixed seed") {
    Workdir w("fdisac_cli_sweep", kSmall);
    const fs::path a = w.root / "a", b = w.root / "b";
    const auto before = listing(w.root);
    Result ra = call({"sweep", "--config", w.config.string(), "--out", a.string(), "--seed", "7", "--no-timing"});
    Result rb = call({"sweep", "--config", w.config.string(), "--out", b.string(), "--seed", "7", "--no-timing"});
    REQUIRE(ra.code == fdisac::cli::kOk);
    REQUIRE(rb.code == fdisac::cli::kOk);
    for (const char* f : {"sweep.csv", "sweep_aggregate.csv", "manifest.json"}) {
        REQUIRE(fs::exists(a / f));
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    }
    CHECK(ra.out == rb.out);
    CHECK(slurp(a / "sweep.csv").find(",7,") != std::string::npos);
    std::set<fs::path> after = listing(w.root);
    for (const auto& p : before) after.erase(p);
    for (const auto& p : after) {
        const std::string s = p.string();
        CHECK_MESSAGE((s.rfind(a.string(), 0) == 0 || s.rfind(b.string(), 0) == 0), s);
    }
}

TEST_CASE("SEED_OVERRIDE applies when --seed is absent") {
    Workdir w("fdisac_cli_env", kSmall);
    ::setenv("SEED_OVERRIDE", "7", 1);
    const Result env = call({"run", "--config", w.config.string(), "--out", (w.root / "e").string(), "--scheme",
                             "fpa_both", "--no-timing"});
    ::unsetenv("SEED_OVERRIDE");
    const Result flag = call({"run", "--config", w.config.string(), "--out", (w.root / "f").string(), "--scheme",
                              "fpa_both", "--no-timing", "--seed", "7"});
    CHECK(env.code == flag.code);
    CHECK(env.out == flag.out);
    CHECK(slurp(w.root / "e" / "solution.json") == slurp(w.root / "f" / "solution.json"));
    ::setenv("SEED_OVERRIDE", "seven", 1);
    CHECK(call({"run", "--config", w.config.string(), "--out", (w.root / "g").string()}).code ==
          fdisac::cli::kUsage);
    ::unsetenv("SEED_OVERRIDE");
}

TEST_CASE("run reports infeasible results with exit code 2") {
    Workdir w("fdisac_cli_infeasible", R"({"gml": {"n_e": 2}, "scenario": {"r_th_d": 1000.0}})");
    const Result r = call({"run", "--config", w.config.string(), "--out", (w.root / "o").string(), "--scheme",
                           "fpa_both"});
    CHECK(r.code == fdisac::cli::kInfeasible);
    CHECK(fs::exists(w.root / "o" / "solution.json"));
}

TEST_CASE("converge and compare write their files") {
    Workdir w("fdisac_cli_misc", kSmall);
    const fs::path c = w.root / "c";
    REQUIRE(call({"converge", "--config", w.config.string(), "--out", c.string(), "--format", "json"}).code ==
            fdisac::cli::kOk);
    CHECK(fs::exists(c / "trace.json"));
    CHECK(fs::exists(c / "solution.json"));
    const fs::path m = w.root / "m";
    REQUIRE(call({"compare", "--config", w.config.string(), "--out", m.string(), "--realizations", "1"}).code ==
            fdisac::cli::kOk);
    CHECK(fs::exists(m / "compare_summary.json"));
    CHECK(call({"compare", "--config", w.config.string(), "--out", m.string(), "--scheme", "ma"}).code ==
          fdisac::cli::kUsage);
    CHECK(call({"sweep", "--config", w.config.string(), "--out", m.string(), "--format", "xml"}).code ==
          fdisac::cli::kUsage);
}
