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

#include "fdisac/channel.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "fdisac/errors.hpp"

namespace fdisac {

using diff::Var;

void PathSet::validate() const {
    if (prm.rows != rx.size() || prm.cols != tx.size()) {
        throw ShapeError("path set: PRM is " + std::to_string(prm.rows) + "x" + std::to_string(prm.cols) +
                         " but angle lists give " + std::to_string(rx.size()) + "x" + std::to_string(tx.size()));
    }
}

template <class T>
T propagation_difference(const Point<T>& position, double theta, double phi) {
    return position.x * (std::cos(theta) * std::sin(phi)) + position.y * std::sin(theta);
}

template <class T>
CVector<T> frv(const Point<T>& position, const std::vector<Angle>& angles, double lambda, double sign) {
    if (angles.empty()) throw ShapeError("frv: empty angle list");
    const double k = sign * 2.0 * std::numbers::pi / lambda;
    CVector<T> out;
    out.reserve(angles.size());
    for (const Angle& a : angles) {
        // Fold the wavenumber into the direction cosines: one affine pair per entry.
        const T phase = position.x * (k * std::cos(a.theta) * std::sin(a.phi)) + position.y * (k * std::sin(a.theta));
        out.push_back(exp_i(phase));
    }
    return out;
}

template <class T>
CMatrix<T> frm(const std::vector<Point<T>>& positions, const std::vector<Angle>& angles, double lambda, double sign) {
    const std::size_t L = angles.size();
    const std::size_t N = positions.size();
    CMatrix<T> m;
    m.rows = L;
    m.cols = N;
    m.data.resize(L * N);
    for (std::size_t n = 0; n < N; ++n) {
        const CVector<T> v = frv(positions[n], angles, lambda, sign);
        for (std::size_t l = 0; l < L; ++l) m(l, n) = v[l];
    }
    return m;
}

namespace {

// C = conj(A)^T B for A (K x M), B (K x N) -> M x N.
template <class A, class B>
CMatrix<promote_t<A, B>> hermitian_product(const CMatrix<A>& a, const CMatrix<B>& b) {
    using R = promote_t<A, B>;
    CMatrix<R> c;
    c.rows = a.cols;
    c.cols = b.cols;
    c.data.reserve(c.rows * c.cols);
    for (std::size_t i = 0; i < a.cols; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            Complex<R> acc = conj_mul(a(0, i), b(0, j));
            for (std::size_t k = 1; k < a.rows; ++k) acc = acc + conj_mul(a(k, i), b(k, j));
            c.data.push_back(acc);
        }
    }
    return c;
}

// C = A B.
template <class A, class B>
CMatrix<promote_t<A, B>> product(const CMatrix<A>& a, const CMatrix<B>& b) {
    using R = promote_t<A, B>;
    CMatrix<R> c;
    c.rows = a.rows;
    c.cols = b.cols;
    c.data.reserve(c.rows * c.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            Complex<R> acc = a(i, 0) * b(0, j);
            for (std::size_t k = 1; k < a.cols; ++k) acc = acc + a(i, k) * b(k, j);
            c.data.push_back(acc);
        }
    }
    return c;
}

CMatrix<double> ones(std::size_t rows, std::size_t cols) {
    return CMatrix<double>(rows, cols, std::vector<cdouble>(rows * cols, cdouble{1.0, 0.0}));
}

template <class T>
CVector<T> column(const CMatrix<T>& m, std::size_t c) {
    CVector<T> v;
    v.reserve(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) v.push_back(m(r, c));
    return v;
}

template <class T>
CVector<T> row(const CMatrix<T>& m, std::size_t r) {
    return CVector<T>(m.data.begin() + static_cast<std::ptrdiff_t>(r * m.cols),
                      m.data.begin() + static_cast<std::ptrdiff_t>((r + 1) * m.cols));
}

}  // namespace

template <class A, class B>
CMatrix<promote_t<A, B>> assemble_link_channel(const CMatrix<A>& receive_frm, const CMatrix<double>& prm,
                                               const CMatrix<B>& transmit_frm) {
    if (receive_frm.rows != prm.rows || prm.cols != transmit_frm.rows) {
        throw ShapeError("assemble_link_channel: F is " + std::to_string(receive_frm.rows) + "x" +
                         std::to_string(receive_frm.cols) + ", Sigma " + std::to_string(prm.rows) + "x" +
                         std::to_string(prm.cols) + ", G " + std::to_string(transmit_frm.rows) + "x" +
                         std::to_string(transmit_frm.cols));
    }
    const std::size_t lr = prm.rows, lt = prm.cols, nr = receive_frm.cols, nt = transmit_frm.cols;
    // Same product either way; pick the association with fewer multiplies.
    if (nr * lr * lt + nr * lt * nt <= lr * lt * nt + nr * lr * nt) {
        return product(hermitian_product(receive_frm, prm), transmit_frm);
    }
    return hermitian_product(receive_frm, product(prm, transmit_frm));
}

template <class T>
SensingChannels<T> build_sensing_channels(const ScenarioConfig& config, const AntennaLayoutT<T>& layout,
                                          const PathCollection& paths) {
    auto steer = [&](const std::vector<Point<T>>& pos, const Angle& a, const cdouble& beta) {
        CVector<T> g;
        g.reserve(pos.size());
        const std::vector<Angle> one{a};
        for (const auto& p : pos) g.push_back(frv(p, one, config.lambda, -1.0)[0] * beta);
        return g;
    };
    SensingChannels<T> s;
    s.g_bt = steer(layout.t_bs, paths.target_tx, paths.beta_bt);
    s.g_srt = steer(layout.r_bs_s, paths.target_rx, paths.beta_srt);
    for (std::size_t c = 0; c < paths.clutter_tx.size(); ++c) {
        s.g_bc.push_back(steer(layout.t_bs, paths.clutter_tx[c], paths.beta_bc[c]));
        s.g_src.push_back(steer(layout.r_bs_s, paths.clutter_rx[c], paths.beta_src[c]));
    }
    return s;
}

template <class T>
ChannelSetT<T> rebuild_channels(const ScenarioConfig& config, const AntennaLayoutT<T>& layout,
                                const PathCollection& paths) {
    const double lambda = config.lambda;
    if (layout.t_bs.size() != static_cast<std::size_t>(config.n_t) ||
        layout.r_bs_c.size() != static_cast<std::size_t>(config.n_rc) ||
        layout.r_bs_s.size() != static_cast<std::size_t>(config.n_rs)) {
        throw ShapeError("rebuild_channels: layout does not match antenna counts");
    }
    if (paths.dl.size() != static_cast<std::size_t>(config.d) || paths.ul.size() != static_cast<std::size_t>(config.u) ||
        paths.clutter_tx.size() != static_cast<std::size_t>(config.c)) {
        throw ShapeError("rebuild_channels: path collection does not match user/clutter counts");
    }

    ChannelSetT<T> ch;
    for (const PathSet& ps : paths.dl) {
        ps.validate();
        const CMatrix<T> g = frm(layout.t_bs, ps.tx, lambda, -1.0);
        ch.h_d.push_back(row(assemble_link_channel(ones(ps.rx.size(), 1), ps.prm, g), 0));
    }
    for (const PathSet& ps : paths.ul) {
        ps.validate();
        const CMatrix<T> f = frm(layout.r_bs_c, ps.rx, lambda, -1.0);
        ch.h_u.push_back(column(assemble_link_channel(f, ps.prm, ones(ps.tx.size(), 1)), 0));
    }
    ch.h_ji = zeros(paths.ui.size(), paths.dl.size());
    for (std::size_t j = 0; j < paths.ui.size(); ++j) {
        for (std::size_t i = 0; i < paths.ui[j].size(); ++i) {
            const PathSet& ps = paths.ui[j][i];
            ps.validate();
            ch.h_ji(j, i) = assemble_link_channel(ones(ps.rx.size(), 1), ps.prm, ones(ps.tx.size(), 1))(0, 0);
        }
    }
    {
        const PathSet& ps = paths.si;
        ps.validate();
        const CMatrix<T> f = frm(layout.r_bs_c, ps.rx, lambda, +1.0);
        const CMatrix<T> g = frm(layout.t_bs, ps.tx, lambda, +1.0);
        const CMatrix<T> m = assemble_link_channel(f, ps.prm, g);  // N_Rc x N_T
        ch.h_si.rows = m.cols;
        ch.h_si.cols = m.rows;
        ch.h_si.data.reserve(m.data.size());
        for (std::size_t t = 0; t < m.cols; ++t) {
            for (std::size_t r = 0; r < m.rows; ++r) ch.h_si.data.push_back(m(r, t));
        }
    }
    for (const PathSet& ps : paths.ur) {
        ps.validate();
        const CMatrix<T> f = frm(layout.r_bs_s, ps.rx, lambda, -1.0);
        ch.h_jr.push_back(column(assemble_link_channel(f, ps.prm, ones(ps.tx.size(), 1)), 0));
    }
    SensingChannels<T> s = build_sensing_channels(config, layout, paths);
    ch.g_bt = std::move(s.g_bt);
    ch.g_srt = std::move(s.g_srt);
    ch.g_bc = std::move(s.g_bc);
    ch.g_src = std::move(s.g_src);
    return ch;
}

namespace {

class Sampler {
  public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(rng_); }
    cdouble unit_cn() {
        const double re = normal_(rng_);
        const double im = normal_(rng_);
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }
    Angle angle() {
        Angle a;
        a.theta = uniform(0.0, std::numbers::pi);
        a.phi = uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
        return a;
    }
    Vec2 annulus(double rmin, double rmax) {
        const double r = std::sqrt(uniform(rmin * rmin, rmax * rmax));
        const double t = uniform(-std::numbers::pi, std::numbers::pi);
        return {r * std::cos(t), r * std::sin(t)};
    }

  private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

double dist(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double pathloss(const ScenarioConfig& c, double d) { return c.g0() * std::pow(std::max(d, 1.0), -c.alpha); }

PathSet draw_link(Sampler& s, int lt, int lr, double entry_variance, double distance) {
    PathSet ps;
    ps.distance = distance;
    for (int m = 0; m < lt; ++m) ps.tx.push_back(s.angle());
    for (int q = 0; q < lr; ++q) ps.rx.push_back(s.angle());
    ps.prm = zeros(static_cast<std::size_t>(lr), static_cast<std::size_t>(lt));
    const double sd = std::sqrt(entry_variance);
    for (auto& z : ps.prm.data) {
        const cdouble w = s.unit_cn();
        z = {w.re * sd, w.im * sd};
    }
    return ps;
}

cdouble scaled(const cdouble& z, double variance) {
    const double sd = std::sqrt(variance);
    return {z.re * sd, z.im * sd};
}

}  // namespace

PathCollection sample_paths(const ScenarioConfig& config, std::uint64_t seed) {
    config.validate();
    Sampler s(seed);
    PathCollection pc;
    pc.seed = seed;
    Geometry& g = pc.geometry;
    g.bs_r = {config.bs_r_position[0], config.bs_r_position[1]};
    for (int i = 0; i < config.d; ++i) g.dl_users.push_back(s.annulus(config.user_radius_min, config.user_radius_max));
    for (int j = 0; j < config.u; ++j) g.ul_users.push_back(s.annulus(config.user_radius_min, config.user_radius_max));
    g.target = s.annulus(config.target_radius_min, config.target_radius_max);
    for (int c = 0; c < config.c; ++c)
        g.clutter.push_back(s.annulus(config.clutter_radius_min, config.clutter_radius_max));

    const Vec2 origin{};
    const int lt = config.paths_tx;
    const int lr = config.paths_rx;
    for (int i = 0; i < config.d; ++i) {
        const double d = dist(origin, g.dl_users[static_cast<std::size_t>(i)]);
        pc.dl.push_back(draw_link(s, lt, lr, pathloss(config, d) / lt, d));
    }
    for (int j = 0; j < config.u; ++j) {
        const double d = dist(origin, g.ul_users[static_cast<std::size_t>(j)]);
        pc.ul.push_back(draw_link(s, lt, lr, pathloss(config, d) / lt, d));
    }
    pc.ui.resize(static_cast<std::size_t>(config.u));
    for (int j = 0; j < config.u; ++j) {
        for (int i = 0; i < config.d; ++i) {
            const double d = dist(g.ul_users[static_cast<std::size_t>(j)], g.dl_users[static_cast<std::size_t>(i)]);
            pc.ui[static_cast<std::size_t>(j)].push_back(draw_link(s, lt, lr, pathloss(config, d) / lt, d));
        }
    }
    pc.si = draw_link(s, lt, lr, config.rho_si() / lt, 0.0);
    for (int j = 0; j < config.u; ++j) {
        const double d = dist(g.bs_r, g.ul_users[static_cast<std::size_t>(j)]);
        pc.ur.push_back(draw_link(s, lt, lr, pathloss(config, d) / lt, d));
    }

    pc.target_tx = s.angle();
    pc.target_rx = s.angle();
    pc.beta_bt = scaled(s.unit_cn(), pathloss(config, dist(origin, g.target)));
    pc.beta_srt = scaled(s.unit_cn(), pathloss(config, dist(g.bs_r, g.target)));
    for (int c = 0; c < config.c; ++c) {
        const Vec2& cp = g.clutter[static_cast<std::size_t>(c)];
        pc.clutter_tx.push_back(s.angle());
        pc.clutter_rx.push_back(s.angle());
        pc.beta_bc.push_back(scaled(s.unit_cn(), pathloss(config, dist(origin, cp))));
        pc.beta_src.push_back(scaled(s.unit_cn(), pathloss(config, dist(g.bs_r, cp))));
    }
    return pc;
}

AntennaLayout fpa_layout(const ScenarioConfig& config) {
    const double step = config.min_spacing();
    const double extent = config.region_extent();
    auto grid = [&](int n) {
        const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
        const int rows = (n + cols - 1) / cols;
        const double ox = 0.5 * (extent - (cols - 1) * step);
        const double oy = 0.5 * (extent - (rows - 1) * step);
        std::vector<Point<double>> p;
        for (int k = 0; k < n; ++k) p.push_back({ox + (k % cols) * step, oy + (k / cols) * step});
        return p;
    };
    AntennaLayout l;
    l.t_bs = grid(config.n_t);
    l.r_bs_c = grid(config.n_rc);
    l.r_bs_s = grid(config.n_rs);
    l.feasible = true;
    return l;
}

std::uint64_t channel_hash(const ChannelSet& ch) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](double v) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 1099511628211ULL;
        }
    };
    auto mixv = [&](const CVector<double>& v) {
        for (const auto& z : v) {
            mix(z.re);
            mix(z.im);
        }
    };
    for (const auto& v : ch.h_d) mixv(v);
    for (const auto& v : ch.h_u) mixv(v);
    mixv(ch.h_ji.data);
    mixv(ch.h_si.data);
    for (const auto& v : ch.h_jr) mixv(v);
    mixv(ch.g_bt);
    mixv(ch.g_srt);
    for (const auto& v : ch.g_bc) mixv(v);
    for (const auto& v : ch.g_src) mixv(v);
    return h;
}

template <class T>
AntennaLayout layout_value(const AntennaLayoutT<T>& l) {
    auto conv = [](const std::vector<Point<T>>& src) {
        std::vector<Point<double>> out;
        out.reserve(src.size());
        for (const auto& p : src) out.push_back({value_of(p.x), value_of(p.y)});
        return out;
    };
    AntennaLayout o;
    o.t_bs = conv(l.t_bs);
    o.r_bs_c = conv(l.r_bs_c);
    o.r_bs_s = conv(l.r_bs_s);
    o.feasible = l.feasible;
    return o;
}

// ---- instantiations -----------------------------------------------------

template double propagation_difference<double>(const Point<double>&, double, double);
template Var propagation_difference<Var>(const Point<Var>&, double, double);
template CVector<double> frv<double>(const Point<double>&, const std::vector<Angle>&, double, double);
template CVector<Var> frv<Var>(const Point<Var>&, const std::vector<Angle>&, double, double);
template CMatrix<double> frm<double>(const std::vector<Point<double>>&, const std::vector<Angle>&, double, double);
template CMatrix<Var> frm<Var>(const std::vector<Point<Var>>&, const std::vector<Angle>&, double, double);
template CMatrix<double> assemble_link_channel<double, double>(const CMatrix<double>&, const CMatrix<double>&,
                                                               const CMatrix<double>&);
template CMatrix<Var> assemble_link_channel<Var, double>(const CMatrix<Var>&, const CMatrix<double>&,
                                                         const CMatrix<double>&);
template CMatrix<Var> assemble_link_channel<double, Var>(const CMatrix<double>&, const CMatrix<double>&,
                                                         const CMatrix<Var>&);
template CMatrix<Var> assemble_link_channel<Var, Var>(const CMatrix<Var>&, const CMatrix<double>&,
                                                      const CMatrix<Var>&);
template SensingChannels<double> build_sensing_channels<double>(const ScenarioConfig&, const AntennaLayoutT<double>&,
                                                                const PathCollection&);
template SensingChannels<Var> build_sensing_channels<Var>(const ScenarioConfig&, const AntennaLayoutT<Var>&,
                                                          const PathCollection&);
template ChannelSetT<double> rebuild_channels<double>(const ScenarioConfig&, const AntennaLayoutT<double>&,
                                                      const PathCollection&);
template ChannelSetT<Var> rebuild_channels<Var>(const ScenarioConfig&, const AntennaLayoutT<Var>&,
                                                const PathCollection&);
template AntennaLayout layout_value<double>(const AntennaLayoutT<double>&);
template AntennaLayout layout_value<Var>(const AntennaLayoutT<Var>&);

}  // namespace fdisac
