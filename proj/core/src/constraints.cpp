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

#include "fdisac/constraints.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <type_traits>

#include "fdisac/errors.hpp"

namespace fdisac {

using diff::Var;

namespace {

/// Paper mode: 1 when the threshold is missed. Soft mode: normalized hinge.
template <class T>
T shortfall(const T& q, double threshold, PenaltyMode mode) {
    if (mode == PenaltyMode::PaperIndicator) return constant_like(q, threshold - value_of(q) > 0.0 ? 1.0 : 0.0);
    const double scale = threshold > 0.0 ? threshold : 1.0;
    return relu(threshold - q) / scale;
}

template <class T>
T excess(const T& q, double limit, PenaltyMode mode) {
    if (mode == PenaltyMode::PaperIndicator) return constant_like(q, value_of(q) > limit ? 1.0 : 0.0);
    return relu(q - limit) / limit;
}

template <class T>
T sum_or_zero(const std::vector<T>& terms, const T& like) {
    if (terms.empty()) return constant_like(like, 0.0);
    T acc = terms[0];
    for (std::size_t k = 1; k < terms.size(); ++k) acc = acc + terms[k];
    return acc;
}

}  // namespace

template <class T>
MetaLossTerms<T> meta_loss_terms(const MetricValues<T>& m, const std::vector<T>& p_u, const AntennaLayoutT<T>& layout,
                                 const ScenarioConfig& cfg, PenaltyMode mode) {
    MetaLossTerms<T> out;
    const T& like = m.lambda_t;
    out.target = -m.lambda_t;
    out.ths = shortfall(m.lambda_t, cfg.lambda_th_s, mode) * cfg.zeta_ths;

    std::vector<T> terms;
    for (const T& r : m.r_d) terms.push_back(shortfall(r, cfg.r_th_d, mode));
    out.thd = sum_or_zero(terms, like) * cfg.zeta_thd;
    terms.clear();
    for (const T& r : m.r_u) terms.push_back(shortfall(r, cfg.r_th_u, mode));
    out.thu = sum_or_zero(terms, like) * cfg.zeta_thu;
    terms.clear();
    for (const T& x : p_u) terms.push_back(excess(x, cfg.p_u_max, mode));
    out.up = sum_or_zero(terms, like) * cfg.zeta_2;

    // Omega: the worst spacing deficit over every pair of every group.
    const double ds = cfg.min_spacing();
    double omega = -std::numeric_limits<double>::infinity();
    const Point<T>* worst_a = nullptr;
    const Point<T>* worst_b = nullptr;
    for (AntennaGroup g : {AntennaGroup::Transmit, AntennaGroup::ReceiveComm, AntennaGroup::ReceiveSense}) {
        const auto& pts = group(layout, g);
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                const double d = std::hypot(value_of(pts[a].x) - value_of(pts[b].x),
                                            value_of(pts[a].y) - value_of(pts[b].y));
                if (ds - d > omega) {
                    omega = ds - d;
                    worst_a = &pts[a];
                    worst_b = &pts[b];
                }
            }
        }
    }
    if (mode == PenaltyMode::PaperIndicator || !(omega > 0.0)) {
        out.ma = constant_like(like, omega > 0.0 ? cfg.zeta_3 : 0.0);
    } else {
        const T dx = worst_a->x - worst_b->x;
        const T dy = worst_a->y - worst_b->y;
        const double d = std::hypot(value_of(dx), value_of(dy));
        // sqrt has no derivative at 0; coincident antennas fall back to a constant.
        const T dist = d > 0.0 ? T(sqrt(square(dx) + square(dy))) : constant_like(like, 0.0);
        out.ma = (ds - dist) * (cfg.zeta_3 / ds);
    }
    out.total = out.target + out.ths + out.thd + out.thu + out.up + out.ma;
    return out;
}

MetaLossBreakdown meta_loss(const MetricsReport& report, const ScenarioConfig& cfg, PenaltyMode mode) {
    MetaLossBreakdown b;
    b.mode = mode;
    const double lam = std::isfinite(report.lambda_t) ? report.lambda_t : kLambdaSentinel;
    b.target_term = -lam;
    b.ths_term = cfg.zeta_ths * shortfall(lam, cfg.lambda_th_s, mode);
    for (double r : report.r_d) b.thd_term += shortfall(r, cfg.r_th_d, mode);
    b.thd_term *= cfg.zeta_thd;
    for (double r : report.r_u) b.thu_term += shortfall(r, cfg.r_th_u, mode);
    b.thu_term *= cfg.zeta_thu;
    for (double x : report.p_u) b.up_term += excess(x, cfg.p_u_max, mode);
    b.up_term *= cfg.zeta_2;
    const double omega = report.spacing_excess;
    if (omega > 0.0) b.ma_term = mode == PenaltyMode::PaperIndicator ? cfg.zeta_3 : cfg.zeta_3 * omega / cfg.min_spacing();
    b.total = b.target_term + b.ths_term + b.thd_term + b.thu_term + b.up_term + b.ma_term;
    return b;
}

template <class T>
CMatrix<T> project_transmit_power(const CMatrix<T>& p, double p_bs) {
    if (!(p_bs > 0.0)) throw ConfigError("project_transmit_power: budget must be positive");
    CMatrix<double> pv;
    pv.rows = p.rows;
    pv.cols = p.cols;
    for (const auto& z : p.data) pv.data.push_back(value_of(z));
    const double tr = transmit_power(pv);
    if (tr <= p_bs) return p;

    double f = std::sqrt(p_bs / tr);
    CMatrix<double> q = pv;
    for (;;) {
        for (std::size_t k = 0; k < q.data.size(); ++k) q.data[k] = {pv.data[k].re * f, pv.data[k].im * f};
        if (transmit_power(q) <= p_bs) break;
        f = std::nextafter(f, 0.0);
    }
    if constexpr (std::is_same_v<T, double>) {
        return q;
    } else {
        // Differentiate through sqrt(p_bs / tr) but carry the nudged value.
        const Var tr_var = transmit_power(p);
        const Var exact = sqrt(p_bs / tr_var);
        const Var factor = exact.tape->push(diff::Op::Affine, exact.id, diff::Tape::kNone, 1.0, 0.0, f);
        CMatrix<Var> out;
        out.rows = p.rows;
        out.cols = p.cols;
        out.data.reserve(p.data.size());
        for (const auto& z : p.data) out.data.push_back({z.re * factor, z.im * factor});
        return out;
    }
}

template <class T>
void normalize_unit_modulus(std::vector<Complex<T>>& v) {
    for (auto& e : v) {
        const double re = value_of(e.re);
        const double im = value_of(e.im);
        if (re == 0.0 && im == 0.0) {
            e = {constant_like(e.re, 1.0), constant_like(e.re, 0.0)};
            continue;
        }
        const T r = sqrt(square(e.re) + square(e.im));
        e = {e.re / r, e.im / r};
    }
}

template <class T>
void normalize_receive_beams(CMatrix<T>& z, CVector<T>& v) {
    normalize_unit_modulus(z.data);
    normalize_unit_modulus(v);
}

namespace {

constexpr int kMaxRepairSweeps = 50;

template <class T>
Point<T> clamp_point(const Point<T>& p, double side) {
    return {clamp(p.x, 0.0, side), clamp(p.y, 0.0, side)};
}

double value_distance(const auto& a, const auto& b) {
    return std::hypot(value_of(a.x) - value_of(b.x), value_of(a.y) - value_of(b.y));
}

/// Candidate spots for `mover` at distance `target` from `anchor`: along
/// the separating direction first, then rotated by multiples of 45 degrees.
/// Each is clamped into the region. The first spot clear of every other
/// antenna wins; failing that, the first one clear of the anchor.
template <class T>
Point<T> push_away(const std::vector<Point<T>>& pts, std::size_t anchor_idx, std::size_t mover_idx, double target,
                   double ds, double side) {
    const Point<T>& anchor = pts[anchor_idx];
    const Point<T>& mover = pts[mover_idx];
    const double d = value_distance(anchor, mover);
    T ux, uy;
    if (d > 0.0) {
        const T dx = mover.x - anchor.x;
        const T dy = mover.y - anchor.y;
        const T len = sqrt(square(dx) + square(dy));
        ux = dx / len;
        uy = dy / len;
    } else {
        ux = constant_like(anchor.x, 1.0);
        uy = constant_like(anchor.x, 0.0);
    }
    static constexpr double kTurns[] = {0.0, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 4.0};
    bool have_fallback = false;
    Point<T> fallback = mover;
    for (double turn : kTurns) {
        const double c = std::cos(turn * std::numbers::pi / 4.0);
        const double sn = std::sin(turn * std::numbers::pi / 4.0);
        const T rx = turn == 0.0 ? ux : ux * c - uy * sn;
        const T ry = turn == 0.0 ? uy : ux * sn + uy * c;
        Point<T> cand = clamp_point(Point<T>{anchor.x + rx * target, anchor.y + ry * target}, side);
        if (value_distance(anchor, cand) < ds) continue;
        bool clear = true;
        for (std::size_t k = 0; k < pts.size() && clear; ++k) {
            if (k != anchor_idx && k != mover_idx && value_distance(pts[k], cand) < ds) clear = false;
        }
        if (clear) return cand;
        if (!have_fallback) {
            fallback = cand;
            have_fallback = true;
        }
    }
    return fallback;
}

template <class T>
bool repair_group(std::vector<Point<T>>& pts, const ScenarioConfig& cfg) {
    const double side = cfg.region_extent();
    const double ds = cfg.min_spacing();
    const double target = ds * (1.0 + 1e-9);
    for (auto& p : pts) p = clamp_point(p, side);
    for (int sweep = 0; sweep < kMaxRepairSweeps; ++sweep) {
        bool violated = false;
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                if (value_distance(pts[a], pts[b]) >= ds) continue;
                violated = true;
                const Point<T> moved = push_away(pts, a, b, target, ds, side);
                if (value_distance(pts[a], moved) >= ds) {
                    pts[b] = moved;
                    continue;
                }
                // The region edge blocked the later antenna; move the earlier one.
                const Point<T> moved_a = push_away(pts, b, a, target, ds, side);
                if (value_distance(pts[b], moved_a) >= ds) pts[a] = moved_a;
            }
        }
        if (!violated) return true;
    }
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            if (value_distance(pts[a], pts[b]) < ds) return false;
        }
    }
    return true;
}

}  // namespace

template <class T>
AntennaLayoutT<T> clamp_layout(const AntennaLayoutT<T>& layout, const ScenarioConfig& cfg) {
    AntennaLayoutT<T> out = layout;
    const char* names[] = {"transmit", "receive-comm", "receive-sense"};
    int k = 0;
    for (AntennaGroup g : {AntennaGroup::Transmit, AntennaGroup::ReceiveComm, AntennaGroup::ReceiveSense}) {
        if (!repair_group(group(out, g), cfg)) {
            throw InfeasibleLayout(std::string("clamp_layout: cannot space the ") + names[k] + " group at " +
                                   std::to_string(cfg.ds) + " wavelengths inside a " +
                                   std::to_string(cfg.region_side) + "-wavelength region");
        }
        ++k;
    }
    out.feasible = true;
    return out;
}

FeasibilityResult feasibility(const MetricsReport& report, const AntennaLayout& layout, const ScenarioConfig& cfg) {
    FeasibilityResult r;
    auto check = [&](const std::string& name, double slack) {
        if (!(slack >= -kFeasibilityTolerance)) r.violated.push_back(name);
    };
    for (const Slack& s : report.slacks) {
        if (s.name.rfind("spacing_", 0) == 0 || s.name == "region") continue;
        check(s.name, s.value);
    }
    const std::vector<double> sm = spacing_margins(cfg, layout);
    check("spacing_t", sm[0]);
    check("spacing_rc", sm[1]);
    check("spacing_rs", sm[2]);
    check("region", region_margin(cfg, layout));
    r.feasible = r.violated.empty();
    return r;
}

#define FDISAC_INSTANTIATE(T)                                                                                     \
    template MetaLossTerms<T> meta_loss_terms<T>(const MetricValues<T>&, const std::vector<T>&,                    \
                                                 const AntennaLayoutT<T>&, const ScenarioConfig&, PenaltyMode);    \
    template CMatrix<T> project_transmit_power<T>(const CMatrix<T>&, double);                                     \
    template void normalize_unit_modulus<T>(std::vector<Complex<T>>&);                                            \
    template void normalize_receive_beams<T>(CMatrix<T>&, CVector<T>&);                                           \
    template AntennaLayoutT<T> clamp_layout<T>(const AntennaLayoutT<T>&, const ScenarioConfig&);

FDISAC_INSTANTIATE(double)
FDISAC_INSTANTIATE(Var)
#undef FDISAC_INSTANTIATE

}  // namespace fdisac
