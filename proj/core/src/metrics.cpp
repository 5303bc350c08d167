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

#include "fdisac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fdisac {

using diff::Var;

namespace {

template <class T>
CVector<T> column(const CMatrix<T>& m, std::size_t c) {
    CVector<T> v;
    v.reserve(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) v.push_back(m(r, c));
    return v;
}

/// sum_n h[n] p[n, col]: received amplitude for a row response.
template <class T>
Complex<T> row_apply(const CVector<T>& h, const CMatrix<T>& p, std::size_t col) {
    Complex<T> acc = h[0] * p(0, col);
    for (std::size_t n = 1; n < h.size(); ++n) acc = acc + h[n] * p(n, col);
    return acc;
}

}  // namespace

template <class T>
T transmit_power(const CMatrix<T>& p) {
    return norm2(p.data);
}

template <class T>
T dl_rate(const ScenarioConfig& cfg, const ChannelSetT<T>& ch, const BeamformingStateT<T>& st, std::size_t i) {
    const CVector<T>& h = ch.h_d.at(i);
    const T sig = abs2(row_apply(h, st.p, i));
    T den = constant_like(sig, cfg.sigma2_d);
    for (std::size_t k = 0; k < st.p.cols; ++k) {
        if (k != i) den = den + abs2(row_apply(h, st.p, k));
    }
    for (std::size_t j = 0; j < st.p_u.size(); ++j) {
        const cdouble g = ch.h_ji(j, i);
        den = den + st.p_u[j] * (g.re * g.re + g.im * g.im);
    }
    return log2(1.0 + sig / den);
}

template <class T>
T ul_rate(const ScenarioConfig& cfg, const ChannelSetT<T>& ch, const BeamformingStateT<T>& st, std::size_t j) {
    const CVector<T> zc = column(st.z, j);
    const T sig = st.p_u.at(j) * abs2(inner(zc, ch.h_u.at(j)));
    const T zn = norm2(zc);
    T den = zn * cfg.sigma2_u;
    for (std::size_t k = 0; k < st.p_u.size(); ++k) {
        if (k != j) den = den + st.p_u[k] * abs2(inner(zc, ch.h_u[k]));
    }

    // Sum of DL precoders, then H_SI^H applied to it.
    const std::size_t nt = st.p.rows, nr = ch.h_si.cols;
    CVector<T> s;
    s.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        Complex<T> acc = st.p(t, 0);
        for (std::size_t i = 1; i < st.p.cols; ++i) acc = acc + st.p(t, i);
        s.push_back(acc);
    }
    CVector<T> w;
    w.reserve(nr);
    for (std::size_t r = 0; r < nr; ++r) {
        Complex<T> acc = conj_mul(ch.h_si(0, r), s[0]);
        for (std::size_t t = 1; t < nt; ++t) acc = acc + conj_mul(ch.h_si(t, r), s[t]);
        w.push_back(acc);
    }
    if (cfg.si_model == SiModel::Quadratic) {
        den = den + abs2(inner(zc, w));
    } else {
        den = den + zn * norm2(w);
    }
    return log2(1.0 + sig / den);
}

template <class T>
std::pair<T, T> echo_powers(const ScenarioConfig& cfg, const ChannelSetT<T>& ch, const BeamformingStateT<T>& st) {
    const std::size_t d = st.p.cols;
    std::vector<CVector<T>> cols;
    cols.reserve(d);
    for (std::size_t i = 0; i < d; ++i) cols.push_back(column(st.p, i));

    const T rx_gain = abs2(inner(st.v, ch.g_srt));
    T tx_sum = abs2(inner(ch.g_bt, cols[0]));
    for (std::size_t i = 1; i < d; ++i) tx_sum = tx_sum + abs2(inner(ch.g_bt, cols[i]));
    const T num = rx_gain * tx_sum * cfg.rcs_target;

    T den = norm2(st.v) * cfg.sigma2_s;
    for (std::size_t j = 0; j < st.p_u.size(); ++j) den = den + st.p_u[j] * abs2(inner(st.v, ch.h_jr.at(j)));
    for (std::size_t c = 0; c < ch.g_bc.size(); ++c) {
        T leak = abs2(inner(ch.g_bc[c], cols[0]));
        for (std::size_t i = 1; i < d; ++i) leak = leak + abs2(inner(ch.g_bc[c], cols[i]));
        den = den + abs2(inner(st.v, ch.g_src[c])) * leak * cfg.rcs_clutter;
    }
    return {num, den};
}

template <class T>
MetricValues<T> evaluate_metrics(const ScenarioConfig& cfg, const ChannelSetT<T>& ch, const BeamformingStateT<T>& st) {
    MetricValues<T> m;
    for (std::size_t i = 0; i < st.p.cols; ++i) m.r_d.push_back(dl_rate(cfg, ch, st, i));
    for (std::size_t j = 0; j < st.p_u.size(); ++j) m.r_u.push_back(ul_rate(cfg, ch, st, j));
    auto [num, den] = echo_powers(cfg, ch, st);
    m.echo_signal = num;
    m.echo_interference = den;
    if (value_of(num) > 0.0) {
        m.lambda_t = log2(num / den);
    } else {
        m.zero_echo = true;
        m.lambda_t = constant_like(num, kLambdaSentinel);
    }
    m.tx_power = transmit_power(st.p);
    return m;
}

SensingResult sensing_objective(const ScenarioConfig& cfg, const ChannelSet& ch, const BeamformingState& st) {
    auto [num, den] = echo_powers(cfg, ch, st);
    SensingResult r;
    r.sinr_linear = num / den;
    r.lambda_t = num > 0.0 ? std::log2(r.sinr_linear) : -std::numeric_limits<double>::infinity();
    return r;
}

BeamformingState state_value(const BeamformingStateT<Var>& s) {
    BeamformingState o;
    auto conv = [](const CMatrix<Var>& m) {
        CMatrix<double> r;
        r.rows = m.rows;
        r.cols = m.cols;
        for (const auto& z : m.data) r.data.push_back(value_of(z));
        return r;
    };
    o.p = conv(s.p);
    o.z = conv(s.z);
    for (const Var& x : s.p_u) o.p_u.push_back(x.value());
    for (const auto& z : s.v) o.v.push_back(value_of(z));
    o.layout = layout_value(s.layout);
    return o;
}

std::vector<double> spacing_margins(const ScenarioConfig& cfg, const AntennaLayout& l) {
    std::vector<double> out;
    for (AntennaGroup g : {AntennaGroup::Transmit, AntennaGroup::ReceiveComm, AntennaGroup::ReceiveSense}) {
        const auto& pts = group(l, g);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                best = std::min(best, std::hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y));
            }
        }
        out.push_back(best - cfg.min_spacing());
    }
    return out;
}

double region_margin(const ScenarioConfig& cfg, const AntennaLayout& l) {
    const double side = cfg.region_extent();
    double m = std::numeric_limits<double>::infinity();
    for (AntennaGroup g : {AntennaGroup::Transmit, AntennaGroup::ReceiveComm, AntennaGroup::ReceiveSense}) {
        for (const auto& p : group(l, g)) m = std::min({m, p.x, p.y, side - p.x, side - p.y});
    }
    return m;
}

MetricsReport full_report(const ScenarioConfig& cfg, const ChannelSet& ch, const BeamformingState& st) {
    const MetricValues<double> m = evaluate_metrics(cfg, ch, st);
    MetricsReport r;
    r.r_d = m.r_d;
    r.r_u = m.r_u;
    r.p_u = st.p_u;
    r.sinr_linear = m.echo_signal / m.echo_interference;
    r.lambda_t = m.zero_echo ? -std::numeric_limits<double>::infinity() : m.lambda_t;
    r.tx_power = m.tx_power;

    for (std::size_t i = 0; i < r.r_d.size(); ++i)
        r.slacks.push_back({"r_d_" + std::to_string(i), r.r_d[i] - cfg.r_th_d});
    for (std::size_t j = 0; j < r.r_u.size(); ++j)
        r.slacks.push_back({"r_u_" + std::to_string(j), r.r_u[j] - cfg.r_th_u});
    r.slacks.push_back({"lambda_t", r.lambda_t - cfg.lambda_th_s});
    r.slacks.push_back({"p_bs", cfg.p_bs - r.tx_power});
    for (std::size_t j = 0; j < st.p_u.size(); ++j) {
        r.slacks.push_back({"p_u_max_" + std::to_string(j), cfg.p_u_max - st.p_u[j]});
        r.slacks.push_back({"p_u_min_" + std::to_string(j), st.p_u[j]});
    }
    double z_dev = 0.0, v_dev = 0.0;
    for (const auto& e : st.z.data) z_dev = std::max(z_dev, std::abs(std::hypot(e.re, e.im) - 1.0));
    for (const auto& e : st.v) v_dev = std::max(v_dev, std::abs(std::hypot(e.re, e.im) - 1.0));
    r.slacks.push_back({"z_modulus", -z_dev});
    r.slacks.push_back({"v_modulus", -v_dev});

    const std::vector<double> sm = spacing_margins(cfg, st.layout);
    r.slacks.push_back({"spacing_t", sm[0]});
    r.slacks.push_back({"spacing_rc", sm[1]});
    r.slacks.push_back({"spacing_rs", sm[2]});
    r.spacing_excess = -std::min({sm[0], sm[1], sm[2]});
    r.slacks.push_back({"region", region_margin(cfg, st.layout)});
    return r;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

}  // namespace

nlohmann::json report_record(const MetricsReport& r) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < r.r_d.size(); ++i) j["r_d_" + std::to_string(i)] = json_number(r.r_d[i]);
    for (std::size_t k = 0; k < r.r_u.size(); ++k) j["r_u_" + std::to_string(k)] = json_number(r.r_u[k]);
    j["sinr_linear"] = json_number(r.sinr_linear);
    j["lambda_t"] = json_number(r.lambda_t);
    j["tx_power"] = json_number(r.tx_power);
    for (const Slack& s : r.slacks) j["slack_" + s.name] = json_number(s.value);
    return j;
}

std::string report_csv_header(const MetricsReport& r) {
    std::ostringstream os;
    for (std::size_t i = 0; i < r.r_d.size(); ++i) os << "r_d_" << i << ',';
    for (std::size_t k = 0; k < r.r_u.size(); ++k) os << "r_u_" << k << ',';
    os << "sinr_linear,lambda_t,tx_power";
    for (const Slack& s : r.slacks) os << ",slack_" << s.name;
    return os.str();
}

std::string report_csv_row(const MetricsReport& r) {
    std::ostringstream os;
    for (double x : r.r_d) os << format_double(x) << ',';
    for (double x : r.r_u) os << format_double(x) << ',';
    os << format_double(r.sinr_linear) << ',' << format_double(r.lambda_t) << ',' << format_double(r.tx_power);
    for (const Slack& s : r.slacks) os << ',' << format_double(s.value);
    return os.str();
}

#define FDISAC_INSTANTIATE(T)                                                                                   \
    template T transmit_power<T>(const CMatrix<T>&);                                                            \
    template T dl_rate<T>(const ScenarioConfig&, const ChannelSetT<T>&, const BeamformingStateT<T>&, std::size_t); \
    template T ul_rate<T>(const ScenarioConfig&, const ChannelSetT<T>&, const BeamformingStateT<T>&, std::size_t); \
    template std::pair<T, T> echo_powers<T>(const ScenarioConfig&, const ChannelSetT<T>&,                        \
                                            const BeamformingStateT<T>&);                                       \
    template MetricValues<T> evaluate_metrics<T>(const ScenarioConfig&, const ChannelSetT<T>&,                   \
                                                 const BeamformingStateT<T>&);

FDISAC_INSTANTIATE(double)
FDISAC_INSTANTIATE(Var)
#undef FDISAC_INSTANTIATE

}  // namespace fdisac
