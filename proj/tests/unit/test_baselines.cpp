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

#include <cmath>

#include "fdisac/baselines.hpp"
#include "toy_oracle.hpp"

using namespace fdisac;

TEST_CASE("grid oracle argmax is consistent with the library metrics") {
    const ScenarioConfig cfg = testing::toy_scenario();
    const PathCollection pc = sample_paths(cfg, 1);
    const testing::ToyOracle o = testing::toy_grid_oracle(cfg, pc);
    REQUIRE(o.feasible);
    CHECK(o.evaluations <= 1000000);
    const Solution s = score_state(cfg, pc, o.argmax, "grid");
    CHECK(s.feasible);
    CHECK(s.objective == doctest::Approx(o.lambda_t).epsilon(1e-9));
}

TEST_CASE("solver reaches the grid optimum of the toy") {
    const ScenarioConfig cfg = testing::toy_scenario();
    for (std::uint64_t seed : {1u, 2u}) {
        const PathCollection pc = sample_paths(cfg, seed);
        const testing::ToyOracle o = testing::toy_grid_oracle(cfg, pc);
        REQUIRE(o.feasible);
        const Solution s = solve_nlp(cfg, pc, NlpOptions{}, seed);
        CHECK(s.feasible);
        CHECK(s.objective >= 0.98 * o.lambda_t);
    }
}

TEST_CASE("solver output is deterministic and within the power budget") {
    const ScenarioConfig cfg;
    const PathCollection pc = sample_paths(cfg, 5);
    NlpOptions opt;
    opt.restarts = 1;
    opt.steps_per_stage = 40;
    const Solution a = solve_nlp(cfg, pc, opt, 9);
    const Solution b = solve_nlp(cfg, pc, opt, 9);
    CHECK(a.objective == b.objective);
    for (std::size_t k = 0; k < a.state.p.data.size(); ++k) CHECK(a.state.p.data[k].im == b.state.p.data[k].im);
    CHECK(a.report.tx_power <= cfg.p_bs);
    CHECK(a.scheme == "nlp");
}

TEST_CASE("more restarts never lower the returned objective") {
    const ScenarioConfig cfg;
    const PathCollection pc = sample_paths(cfg, 6);
    NlpOptions one;
    one.restarts = 1;
    one.steps_per_stage = 40;
    NlpOptions four = one;
    four.restarts = 4;
    const Solution a = solve_nlp(cfg, pc, one, 2);
    const Solution b = solve_nlp(cfg, pc, four, 2);
    if (a.feasible) {
        CHECK(b.feasible);
        CHECK(b.objective >= a.objective);
    }
}

TEST_CASE("projection enforces every hard constraint") {
    const ScenarioConfig cfg;
    BeamformingState s = initial_state(cfg, 3);
    for (auto& z : s.p.data) z = {3.0 * z.re, -2.0 * z.im};
    s.p_u = {-0.5, 2.0};
    s.z.data[1] = {0.2, 0.1};
    s.v[0] = {0.0, 0.0};
    s.layout.t_bs[2] = s.layout.t_bs[1];
    s.layout.r_bs_s[0].x = -1.0;
    const BeamformingState q = project_state(cfg, s);
    const PathCollection pc = sample_paths(cfg, 3);
    const MetricsReport r = full_report(cfg, rebuild_channels(cfg, q.layout, pc), q);
    for (const Slack& sl : r.slacks) {
        if (sl.name.rfind("r_", 0) == 0 || sl.name == "lambda_t") continue;
        CHECK_MESSAGE(sl.value >= -kFeasibilityTolerance, sl.name);
    }
}

TEST_CASE("penalized objective equals Lambda_t on feasible points") {
    const ScenarioConfig cfg;
    const PathCollection pc = sample_paths(cfg, 1);
    const Solution s = solve_nlp(cfg, pc, NlpOptions{}, 1);
    REQUIRE(s.feasible);
    const ChannelSet ch = rebuild_channels(cfg, s.state.layout, pc);
    CHECK(penalized_objective(cfg, ch, s.state, 1e6) == doctest::Approx(s.objective).epsilon(1e-12));
    ScenarioConfig strict = cfg;
    strict.r_th_d = 1e3;
    CHECK(penalized_objective(strict, ch, s.state, 1.0) < s.objective);
}

TEST_CASE("baseline dispatch and masks") {
    CHECK(to_string(BaselineKind::NlpSolver) == "nlp");
    CHECK(to_string(BaselineKind::MaFdOnly) == "ma_fd_only");
    CHECK(to_string(BaselineKind::FpaBoth) == "fpa_both");
    CHECK(mask_for(BaselineKind::FpaBoth).all());
    const LayoutMask fd = mask_for(BaselineKind::MaFdOnly);
    CHECK(fd.receive_sense);
    CHECK_FALSE(fd.transmit);
    CHECK_FALSE(fd.receive_comm);
    BaselineSpec bad;
    bad.nlp.restarts = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("all schemes share one scoring path") {
    const ScenarioConfig cfg;
    const PathCollection pc = sample_paths(cfg, 2);
    GmlConfig g;
    g.n_e = 3;
    BaselineSpec spec;
    spec.kind = BaselineKind::FpaBoth;
    spec.gml = g;
    const Solution f = solve_baseline(cfg, pc, spec, 2);
    const Solution again = score_state(cfg, pc, f.state, "fpa_both");
    CHECK(f.objective == again.objective);
    CHECK(f.channel_hash == again.channel_hash);
    CHECK(f.scheme == "fpa_both");
}
