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

#pragma once

/// DL/UL rates, echo SINR and the log-normalized sensing objective.
///
/// Everything is templated on the scalar so the optimizers can evaluate the
/// same formulas on the tape.

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdisac/channel.hpp"
#include "fdisac/config.hpp"

namespace fdisac {

/// The optimizable blocks. p is N_T x D with column i the precoder of DL
/// user i; z is N_Rc x U with column j the combiner of UL user j.
template <class T>
struct BeamformingStateT {
    CMatrix<T> p;
    std::vector<T> p_u;
    CMatrix<T> z;
    CVector<T> v;
    AntennaLayoutT<T> layout;
};
using BeamformingState = BeamformingStateT<double>;

BeamformingState state_value(const BeamformingStateT<diff::Var>& s);
inline const BeamformingState& state_value(const BeamformingState& s) { return s; }

/// Loss-side stand-in for log2(0).
inline constexpr double kLambdaSentinel = -1e6;

/// Intermediate quantities shared by reports and losses.
template <class T>
struct MetricValues {
    std::vector<T> r_d;
    std::vector<T> r_u;
    T echo_signal;  // numerator of the echo SINR
    T echo_interference;  // I_D + I_C + noise
    T lambda_t;     // log2 SINR, or kLambdaSentinel when the numerator is 0
    T tx_power;
    bool zero_echo = false;
};

template <class T>
T dl_rate(const ScenarioConfig& cfg, const ChannelSetT<T>& ch, const BeamformingStateT<T>& st, std::size_t i);

template <class T>
T ul_rate(const ScenarioConfig& cfg, const ChannelSetT<T>& ch, const BeamformingStateT<T>& st, std::size_t j);

/// (echo signal power, interference-plus-noise power).
template <class T>
std::pair<T, T> echo_powers(const ScenarioConfig& cfg, const ChannelSetT<T>& ch, const BeamformingStateT<T>& st);

template <class T>
T transmit_power(const CMatrix<T>& p);

template <class T>
MetricValues<T> evaluate_metrics(const ScenarioConfig& cfg, const ChannelSetT<T>& ch, const BeamformingStateT<T>& st);

struct SensingResult {
    double sinr_linear = 0.0;
    double lambda_t = 0.0;  // -inf when the echo numerator is exactly zero
};

SensingResult sensing_objective(const ScenarioConfig& cfg, const ChannelSet& ch, const BeamformingState& st);

/// Named slack: value >= 0 means the constraint holds.
struct Slack {
    std::string name;
    double value = 0.0;
};

struct MetricsReport {
    std::vector<double> r_d;
    std::vector<double> r_u;
    std::vector<double> p_u;
    double sinr_linear = 0.0;
    double lambda_t = 0.0;
    double tx_power = 0.0;
    /// DS*lambda minus the smallest pairwise distance over all groups; <= 0
    /// when the spacing rule holds.
    double spacing_excess = 0.0;
    std::vector<Slack> slacks;
};

/// Smallest pairwise distance minus DS*lambda, per group order
/// (transmit, receive-comm, receive-sense). Groups of one antenna give +inf.
std::vector<double> spacing_margins(const ScenarioConfig& cfg, const AntennaLayout& l);

/// Smallest distance of any coordinate to its region edge (negative outside).
double region_margin(const ScenarioConfig& cfg, const AntennaLayout& l);

MetricsReport full_report(const ScenarioConfig& cfg, const ChannelSet& ch, const BeamformingState& st);

/// Flat record with stable field names: r_d_<i>, r_u_<j>, sinr_linear,
/// lambda_t, tx_power, slack_<name>.
nlohmann::json report_record(const MetricsReport& r);
std::string report_csv_header(const MetricsReport& r);
std::string report_csv_row(const MetricsReport& r);

/// Format with 17 significant digits (round-trip exact). inf/nan spelled
/// inf, -inf, nan.
std::string format_double(double v);

}  // namespace fdisac
