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
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "fdisac/channel.hpp"
#include "fdisac/errors.hpp"
#include "channel_oracle.hpp"

using namespace fdisac;
using cplx = std::complex<double>;

using testing::random_layout;

TEST_CASE("assembled channels equal brute-force path sums on every link") {
    ScenarioConfig cfg;
    cfg.n_t = 3;
    cfg.n_rc = 4;
    cfg.n_rs = 2;
    cfg.paths_tx = 3;
    cfg.paths_rx = 5;
    for (std::uint64_t seed : {1u, 2u, 3u, 11u}) {
        const PathCollection pc = sample_paths(cfg, seed);
        const AntennaLayout l = random_layout(cfg, seed + 100);
        const ChannelSet ch = rebuild_channels(cfg, l, pc);
        CHECK(testing::max_channel_error(cfg, pc, l, ch) <= 1e-12);
        CHECK(ch.h_si.rows == l.t_bs.size());
        CHECK(ch.h_si.cols == l.r_bs_c.size());
    }
}

TEST_CASE("field-response entries are unit modulus and trivial at the origin") {
    const std::vector<Angle> angles{{0.3, -1.0}, {2.0, 0.4}, {1.1, 1.5}};
    const CVector<double> at0 = frv(Point<double>{0.0, 0.0}, angles, 0.01);
    for (const cdouble& z : at0) {
        CHECK(z.re == 1.0);
        CHECK(z.im == 0.0);
    }
    const CVector<double> f = frv(Point<double>{0.0123, 0.0071}, angles, 0.01);
    for (const cdouble& z : f) CHECK(std::hypot(z.re, z.im) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("realizations are deterministic in the seed") {
    const ScenarioConfig cfg;
    const AntennaLayout l = fpa_layout(cfg);
    const auto h1 = channel_hash(rebuild_channels(cfg, l, sample_paths(cfg, 5)));
    const auto h2 = channel_hash(rebuild_channels(cfg, l, sample_paths(cfg, 5)));
    const auto h3 = channel_hash(rebuild_channels(cfg, l, sample_paths(cfg, 6)));
    CHECK(h1 == h2);
    CHECK(h1 != h3);
}

TEST_CASE("power-scaling parameters keep the realization paired") {
    ScenarioConfig a;
    ScenarioConfig b = a;
    b.p_bs = 4.0;
    b.rho_si_db = a.rho_si_db + 20.0;
    const PathCollection pa = sample_paths(a, 9);
    const PathCollection pb = sample_paths(b, 9);
    CHECK(pa.geometry.target.x == pb.geometry.target.x);
    CHECK(pa.dl[0].prm.data[3].re == pb.dl[0].prm.data[3].re);
    CHECK(pa.beta_bt.im == pb.beta_bt.im);
    // rho_SI only rescales the SI path responses: +20 dB is x10 in amplitude.
    for (std::size_t k = 0; k < pa.si.prm.data.size(); ++k) {
        CHECK(pb.si.prm.data[k].re == doctest::Approx(10.0 * pa.si.prm.data[k].re).epsilon(1e-12));
    }
}

TEST_CASE("sampled positions stay in their annuli") {
    const ScenarioConfig cfg;
    for (std::uint64_t s = 1; s <= 30; ++s) {
        const Geometry g = sample_paths(cfg, s).geometry;
        for (const Vec2& p : g.dl_users) {
            CHECK(std::hypot(p.x, p.y) >= cfg.user_radius_min);
            CHECK(std::hypot(p.x, p.y) <= cfg.user_radius_max);
        }
        CHECK(std::hypot(g.target.x, g.target.y) >= cfg.target_radius_min);
        CHECK(std::hypot(g.target.x, g.target.y) <= cfg.target_radius_max);
        for (const Vec2& p : g.clutter) CHECK(std::hypot(p.x, p.y) <= cfg.clutter_radius_max);
    }
}

TEST_CASE("reference layout is a centered grid at the minimum spacing") {
    const ScenarioConfig cfg;
    const AntennaLayout l = fpa_layout(cfg);
    REQUIRE(l.t_bs.size() == 4);
    const double ext = cfg.region_extent();
    double cx = 0.0, cy = 0.0;
    for (const auto& p : l.t_bs) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= ext);
        cx += p.x / 4.0;
        cy += p.y / 4.0;
    }
    CHECK(cx == doctest::Approx(ext / 2.0));
    CHECK(cy == doctest::Approx(ext / 2.0));
    double dmin = 1e9;
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b)
            dmin = std::min(dmin, std::hypot(l.t_bs[a].x - l.t_bs[b].x, l.t_bs[a].y - l.t_bs[b].y));
    CHECK(dmin == doctest::Approx(cfg.min_spacing()).epsilon(1e-12));
}

TEST_CASE("taped channels match plain values and position derivatives") {
    const ScenarioConfig cfg;
    const PathCollection pc = sample_paths(cfg, 3);
    const AntennaLayout l = random_layout(cfg, 42);
    const ChannelSet plain = rebuild_channels(cfg, l, pc);

    diff::Tape t;
    AntennaLayoutT<diff::Var> lv;
    for (const auto& p : l.t_bs) lv.t_bs.push_back({t.leaf(p.x), t.leaf(p.y)});
    for (const auto& p : l.r_bs_c) lv.r_bs_c.push_back({t.leaf(p.x), t.leaf(p.y)});
    for (const auto& p : l.r_bs_s) lv.r_bs_s.push_back({t.leaf(p.x), t.leaf(p.y)});
    const ChannelSetT<diff::Var> taped = rebuild_channels(cfg, lv, pc);
    CHECK(value_of(taped.h_d[1][2]).re == plain.h_d[1][2].re);
    CHECK(value_of(taped.h_si(3, 1)).im == plain.h_si(3, 1).im);

    // d |h_d[0][1]|^2 / d x of transmit antenna 1 against central differences.
    const diff::Var f = abs2(taped.h_d[0][1]);
    const std::vector<diff::Var> wrt{lv.t_bs[1].x};
    const double g = t.gradient(f, wrt)[0];
    const double h = 1e-7 * cfg.lambda;
    auto value_at = [&](double dx) {
        AntennaLayout m = l;
        m.t_bs[1].x += dx;
        const cdouble z = rebuild_channels(cfg, m, pc).h_d[0][1];
        return z.re * z.re + z.im * z.im;
    };
    CHECK(g == doctest::Approx((value_at(h) - value_at(-h)) / (2.0 * h)).epsilon(1e-6));
}

TEST_CASE("shape mismatches are rejected") {
    const ScenarioConfig cfg;
    const PathCollection pc = sample_paths(cfg, 1);
    AntennaLayout l = fpa_layout(cfg);
    l.t_bs.pop_back();
    CHECK_THROWS_AS(rebuild_channels(cfg, l, pc), ShapeError);
    CHECK_THROWS_AS(assemble_link_channel(zeros(2, 3), zeros(3, 2), zeros(2, 2)), ShapeError);
}
