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
#include <limits>
#include <random>
#include <vector>

#include "fdisac/gml.hpp"
#include "fdisac/metrics.hpp"

using namespace fdisac;
using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

namespace {

cplx sc(const cdouble& z) { return {z.re, z.im}; }

CVec vec(const CVector<double>& v) {
    CVec o;
    for (const auto& z : v) o.push_back(sc(z));
    return o;
}

CVec col(const CMatrix<double>& m, std::size_t c) {
    CVec o;
    for (std::size_t r = 0; r < m.rows; ++r) o.push_back(sc(m(r, c)));
    return o;
}

// a^H b
cplx herm(const CVec& a, const CVec& b) {
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a[k]) * b[k];
    return acc;
}

// sum_k a[k] b[k] (row response applied to a column)
cplx row_dot(const CVec& row, const CVec& b) {
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * b[k];
    return acc;
}

double nrm2(const CVec& a) {
    double s = 0.0;
    for (const cplx& z : a) s += std::norm(z);
    return s;
}

struct Oracle {
    std::vector<double> r_d, r_u;
    double lambda_t;
};

// Straight-line evaluation of the rate and echo formulas.
Oracle oracle(const ScenarioConfig& cfg, const ChannelSet& ch, const BeamformingState& s) {
    Oracle o;
    const std::size_t d = s.p.cols, u = s.p_u.size();
    for (std::size_t i = 0; i < d; ++i) {
        const CVec h = vec(ch.h_d[i]);
        double intf = cfg.sigma2_d;
        for (std::size_t k = 0; k < d; ++k)
            if (k != i) intf += std::norm(row_dot(h, col(s.p, k)));
        for (std::size_t j = 0; j < u; ++j) intf += s.p_u[j] * std::norm(sc(ch.h_ji(j, i)));
        o.r_d.push_back(std::log2(1.0 + std::norm(row_dot(h, col(s.p, i))) / intf));
    }
    CVec psum(s.p.rows, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t t = 0; t < s.p.rows; ++t) psum[t] += sc(s.p(t, i));
    // H_SI^H psum, H_SI stored N_T x N_Rc.
    CVec si(ch.h_si.cols, cplx{0.0, 0.0});
    for (std::size_t r = 0; r < ch.h_si.cols; ++r)
        for (std::size_t t = 0; t < ch.h_si.rows; ++t) si[r] += std::conj(sc(ch.h_si(t, r))) * psum[t];
    for (std::size_t j = 0; j < u; ++j) {
        const CVec z = col(s.z, j);
        double intf = nrm2(z) * cfg.sigma2_u + std::norm(herm(z, si));
        for (std::size_t k = 0; k < u; ++k)
            if (k != j) intf += s.p_u[k] * std::norm(herm(z, vec(ch.h_u[k])));
        o.r_u.push_back(std::log2(1.0 + s.p_u[j] * std::norm(herm(z, vec(ch.h_u[j]))) / intf));
    }
    const CVec v = vec(s.v);
    double tx = 0.0;
    for (std::size_t i = 0; i < d; ++i) tx += std::norm(herm(vec(ch.g_bt), col(s.p, i)));
    const double num = cfg.rcs_target * std::norm(herm(v, vec(ch.g_srt))) * tx;
    double den = cfg.sigma2_s * nrm2(v);
    for (std::size_t j = 0; j < u; ++j) den += s.p_u[j] * std::norm(herm(v, vec(ch.h_jr[j])));
    for (std::size_t c = 0; c < ch.g_bc.size(); ++c) {
        double leak = 0.0;
        for (std::size_t i = 0; i < d; ++i) leak += std::norm(herm(vec(ch.g_bc[c]), col(s.p, i)));
        den += cfg.rcs_clutter * std::norm(herm(v, vec(ch.g_src[c]))) * leak;
    }
    o.lambda_t = std::log2(num / den);
    return o;
}

BeamformingState random_state(const ScenarioConfig& cfg, std::uint64_t seed) {
    BeamformingState s = initial_state(cfg, seed);
    std::mt19937_64 rng(seed * 7 + 1);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> ph(-3.14159, 3.14159), pu(0.0, cfg.p_u_max);
    for (auto& z : s.z.data) {
        const double a = ph(rng);
        z = {std::cos(a), std::sin(a)};
    }
    for (auto& z : s.v) {
        const double a = ph(rng);
        z = {std::cos(a), std::sin(a)};
    }
    for (auto& p : s.p_u) p = pu(rng);
    for (auto& z : s.p.data) z = {0.3 * n(rng), 0.3 * n(rng)};
    return s;
}

}  // namespace

TEST_CASE("rates and echo SINR match the straight-line oracle") {
    const ScenarioConfig cfg;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const PathCollection pc = sample_paths(cfg, seed);
        const BeamformingState s = random_state(cfg, seed);
        const ChannelSet ch = rebuild_channels(cfg, s.layout, pc);
        const MetricsReport r = full_report(cfg, ch, s);
        const Oracle o = oracle(cfg, ch, s);
        for (std::size_t i = 0; i < o.r_d.size(); ++i) CHECK(r.r_d[i] == doctest::Approx(o.r_d[i]).epsilon(1e-12));
        for (std::size_t j = 0; j < o.r_u.size(); ++j) CHECK(r.r_u[j] == doctest::Approx(o.r_u[j]).epsilon(1e-12));
        CHECK(r.lambda_t == doctest::Approx(o.lambda_t).epsilon(1e-12));
    }
}

TEST_CASE("factored SI model bounds the quadratic one from above") {
    // |z^H w|^2 <= ||z||^2 ||w||^2, so the factored model can only lower UL rates.
    ScenarioConfig q;
    q.rho_si_db = -60.0;
    ScenarioConfig f = q;
    f.si_model = SiModel::Factored;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const PathCollection pc = sample_paths(q, seed);
        const BeamformingState s = random_state(q, seed);
        const ChannelSet ch = rebuild_channels(q, s.layout, pc);
        for (std::size_t j = 0; j < s.p_u.size(); ++j) CHECK(ul_rate(f, ch, s, j) <= ul_rate(q, ch, s, j));
    }
}

TEST_CASE("sensing objective is invariant to complex scaling of V") {
    const ScenarioConfig cfg;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const PathCollection pc = sample_paths(cfg, seed);
        BeamformingState s = random_state(cfg, seed);
        const ChannelSet ch = rebuild_channels(cfg, s.layout, pc);
        const double base = sensing_objective(cfg, ch, s).lambda_t;
        for (cplx c : {cplx{2.0, 0.0}, cplx{0.0, -3.5}, cplx{0.01, 0.2}}) {
            BeamformingState t = s;
            for (auto& z : t.v) z = cdouble{(sc(z) * c).real(), (sc(z) * c).imag()};
            CHECK(std::abs(sensing_objective(cfg, ch, t).lambda_t - base) < 1e-9);
        }
    }
}

TEST_CASE("UL rate is invariant to complex scaling of its combiner") {
    const ScenarioConfig cfg;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const PathCollection pc = sample_paths(cfg, seed);
        const BeamformingState s = random_state(cfg, seed);
        const ChannelSet ch = rebuild_channels(cfg, s.layout, pc);
        for (std::size_t j = 0; j < s.p_u.size(); ++j) {
            const double base = ul_rate(cfg, ch, s, j);
            for (cplx c : {cplx{-1.5, 0.7}, cplx{1e-3, 0.0}}) {
                BeamformingState t = s;
                for (std::size_t r = 0; r < t.z.rows; ++r) {
                    const cplx z = sc(t.z(r, j)) * c;
                    t.z(r, j) = {z.real(), z.imag()};
                }
                CHECK(std::abs(ul_rate(cfg, ch, t, j) - base) < 1e-9);
            }
        }
    }
}

TEST_CASE("zero echo reports -inf without faulting") {
    const ScenarioConfig cfg;
    const PathCollection pc = sample_paths(cfg, 2);
    BeamformingState s = random_state(cfg, 2);
    for (auto& z : s.p.data) z = {0.0, 0.0};
    const ChannelSet ch = rebuild_channels(cfg, s.layout, pc);
    const MetricValues<double> m = evaluate_metrics(cfg, ch, s);
    CHECK(m.zero_echo);
    CHECK(m.lambda_t == kLambdaSentinel);
    const MetricsReport r = full_report(cfg, ch, s);
    CHECK(r.lambda_t == -std::numeric_limits<double>::infinity());
    CHECK(report_record(r)["lambda_t"] == "-inf");
}

TEST_CASE("slacks carry the constraint values") {
    const ScenarioConfig cfg;
    const PathCollection pc = sample_paths(cfg, 4);
    const BeamformingState s = random_state(cfg, 4);
    const ChannelSet ch = rebuild_channels(cfg, s.layout, pc);
    const MetricsReport r = full_report(cfg, ch, s);
    auto slack = [&](const std::string& n) {
        for (const Slack& x : r.slacks)
            if (x.name == n) return x.value;
        FAIL("missing slack " << n);
        return 0.0;
    };
    CHECK(slack("r_d_1") == r.r_d[1] - cfg.r_th_d);
    CHECK(slack("r_u_0") == r.r_u[0] - cfg.r_th_u);
    CHECK(slack("p_bs") == cfg.p_bs - r.tx_power);
    CHECK(slack("p_u_max_1") == cfg.p_u_max - s.p_u[1]);
    CHECK(slack("z_modulus") == doctest::Approx(0.0).epsilon(1e-12));
    // Reference grid: every group sits exactly at the minimum spacing.
    CHECK(std::abs(slack("spacing_t")) < 1e-15);
    CHECK(slack("region") > 0.0);
    CHECK(r.tx_power == doctest::Approx(nrm2(col(s.p, 0)) + nrm2(col(s.p, 1))).epsilon(1e-14));
}

TEST_CASE("spacing and region margins on a hand-built layout") {
    ScenarioConfig cfg;
    cfg.n_t = cfg.n_rc = cfg.n_rs = 2;
    AntennaLayout l;
    const double lam = cfg.lambda;
    l.t_bs = {{0.0, 0.0}, {0.3 * lam, 0.4 * lam}};     // distance 0.5 lambda
    l.r_bs_c = {{0.1 * lam, 0.1 * lam}, {lam, lam}};
    l.r_bs_s = {{0.5 * lam, 0.5 * lam}, {2.1 * lam, 0.5 * lam}};  // outside by 0.1 lambda
    const auto m = spacing_margins(cfg, l);
    CHECK(m[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx((std::sqrt(2.0) * 0.9 - 0.5) * lam).epsilon(1e-12));
    CHECK(region_margin(cfg, l) == doctest::Approx(-0.1 * lam).epsilon(1e-12));
    cfg.n_t = 1;
    AntennaLayout single = l;
    single.t_bs.resize(1);
    CHECK(std::isinf(spacing_margins(cfg, single)[0]));
}

TEST_CASE("taped metrics reproduce plain values and finite-difference gradients") {
    const ScenarioConfig cfg;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const PathCollection pc = sample_paths(cfg, seed);
        const BeamformingState s = random_state(cfg, seed);
        const ChannelSet ch = rebuild_channels(cfg, s.layout, pc);
        const MetricValues<double> plain = evaluate_metrics(cfg, ch, s);

        diff::Tape tape;
        StateVar sv = lift_state(tape, s);
        // make P entry (1, 0) and layout x of receive-sense antenna 2 leaves
        sv.p(1, 0).re = tape.leaf(s.p(1, 0).re);
        sv.layout.r_bs_s[2].x = tape.leaf(s.layout.r_bs_s[2].x);
        const ChannelSetT<diff::Var> chv = rebuild_channels(cfg, sv.layout, pc);
        const MetricValues<diff::Var> taped = evaluate_metrics(cfg, chv, sv);
        CHECK(taped.lambda_t.value() == doctest::Approx(plain.lambda_t).epsilon(1e-14));
        CHECK(taped.r_u[1].value() == doctest::Approx(plain.r_u[1]).epsilon(1e-14));

        const std::vector<diff::Var> wrt{sv.p(1, 0).re, sv.layout.r_bs_s[2].x};
        const auto g = tape.gradient(taped.lambda_t, wrt);
        auto lam_at = [&](double dp, double dx) {
            BeamformingState t = s;
            t.p(1, 0).re += dp;
            t.layout.r_bs_s[2].x += dx;
            return evaluate_metrics(cfg, rebuild_channels(cfg, t.layout, pc), t).lambda_t;
        };
        const double hp = 1e-6, hx = 1e-7 * cfg.lambda;
        CHECK(g[0] == doctest::Approx((lam_at(hp, 0) - lam_at(-hp, 0)) / (2 * hp)).epsilon(1e-6));
        CHECK(g[1] == doctest::Approx((lam_at(0, hx) - lam_at(0, -hx)) / (2 * hx)).epsilon(1e-6));
    }
}

TEST_CASE("17-digit formatting round-trips") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 200; ++k) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
}
