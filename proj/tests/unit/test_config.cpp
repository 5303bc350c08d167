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

#include <string>

#include "fdisac/config.hpp"
#include "fdisac/errors.hpp"

using namespace fdisac;

TEST_CASE("empty document yields validated defaults") {
    const RunConfig c = parse_config("{}");
    CHECK(c.scenario.n_t == 4);
    CHECK(c.scenario.d == 2);
    CHECK(c.gml.n_e == 500);
    CHECK(c.gml.n_i == 10);
    CHECK(c.gml.hidden == 200);
    CHECK(c.gml.meta_lr == 1e-3);
    CHECK(c.gml.penalty_mode == PenaltyMode::SoftHinge);
    CHECK(c.nlp.restarts == 20);
    CHECK(c.sweep.realizations == 150);
}

TEST_CASE("json round trip preserves every field and the hash") {
    RunConfig c;
    c.scenario.n_t = 3;
    c.scenario.rho_si_db = -77.5;
    c.scenario.si_model = SiModel::Factored;
    c.gml.penalty_mode = PenaltyMode::PaperIndicator;
    c.gml.truncation = 3;
    c.sweep.parameter = "thresholds";
    c.sweep.values_d = {0.5, 1.0};
    c.sweep.values_u = {0.25};
    c.seed = 99;
    nlohmann::json j;
    to_json(j, c);
    const RunConfig back = parse_config(j.dump());
    nlohmann::json j2;
    to_json(j2, back);
    CHECK(j == j2);
    CHECK(config_hash(j) == config_hash(j2));
    CHECK(back.scenario.si_model == SiModel::Factored);
    CHECK(back.gml.penalty_mode == PenaltyMode::PaperIndicator);
    CHECK(back.seed == 99);
}

TEST_CASE("hash changes with content") {
    nlohmann::json a, b;
    RunConfig c;
    to_json(a, c);
    c.scenario.p_bs = 2.0;
    to_json(b, c);
    CHECK(config_hash(a) != config_hash(b));
    CHECK(hex64(0x1f).size() == 16);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(parse_config(R"({"scenario":{"n_tt":4}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"gmll":{}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"scenario":{"si_model":"other"}})"), ConfigError);
}

TEST_CASE("invariants are enforced") {
    CHECK_THROWS_AS(parse_config(R"({"scenario":{"n_t":0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"scenario":{"p_bs":-1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"scenario":{"region_side":0.5,"n_t":9}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"gml":{"n_e":0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sweep":{"values":[]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sweep":{"realizations":0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
}

TEST_CASE("penalty mode names") {
    CHECK(penalty_mode_from_string("soft") == PenaltyMode::SoftHinge);
    CHECK(penalty_mode_from_string("paper") == PenaltyMode::PaperIndicator);
    CHECK_THROWS_AS(penalty_mode_from_string("hard"), ConfigError);
}

TEST_CASE("missing file surfaces the path") {
    try {
        (void)load_config("/nonexistent/dir/cfg.json");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.path == "/nonexistent/dir/cfg.json");
    }
}
