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

/// Meta-loss, projections and geometric repair.

#include <string>
#include <vector>

#include "fdisac/config.hpp"
#include "fdisac/metrics.hpp"

namespace fdisac {

struct MetaLossBreakdown {
    double target_term = 0.0;
    double ths_term = 0.0;
    double thd_term = 0.0;
    double thu_term = 0.0;
    double up_term = 0.0;
    double ma_term = 0.0;
    double total = 0.0;
    PenaltyMode mode = PenaltyMode::PaperIndicator;
};

template <class T>
struct MetaLossTerms {
    T target;
    T ths;
    T thd;
    T thu;
    T up;
    T ma;
    T total;
};

/// Loss from a finished report. A -inf Lambda_t enters as kLambdaSentinel.
MetaLossBreakdown meta_loss(const MetricsReport& report, const ScenarioConfig& cfg, PenaltyMode mode);

/// Same loss on taped quantities. In paper mode the penalty terms are
/// constants (their derivative is zero almost everywhere).
template <class T>
MetaLossTerms<T> meta_loss_terms(const MetricValues<T>& m, const std::vector<T>& p_u, const AntennaLayoutT<T>& layout,
                                 const ScenarioConfig& cfg, PenaltyMode mode);

/// Scale P onto the budget when Tr(PP^H) > p_bs. The factor is nudged down
/// until the recomputed trace is <= p_bs, so the result is bit-exactly
/// within budget and a second projection is a no-op.
template <class T>
CMatrix<T> project_transmit_power(const CMatrix<T>& p, double p_bs);

/// Entrywise unit modulus; zero entries become 1+0j.
template <class T>
void normalize_unit_modulus(std::vector<Complex<T>>& v);

template <class T>
void normalize_receive_beams(CMatrix<T>& z, CVector<T>& v);

/// Clamp into the region, then greedily repair spacing violations (up to 50
/// sweeps). Sets `feasible` on success; throws InfeasibleLayout otherwise.
template <class T>
AntennaLayoutT<T> clamp_layout(const AntennaLayoutT<T>& layout, const ScenarioConfig& cfg);

struct FeasibilityResult {
    bool feasible = false;
    std::vector<std::string> violated;
};

inline constexpr double kFeasibilityTolerance = 1e-9;

/// Every report slack (with layout slacks recomputed from `layout`) must be
/// >= -kFeasibilityTolerance.
FeasibilityResult feasibility(const MetricsReport& report, const AntennaLayout& layout, const ScenarioConfig& cfg);

}  // namespace fdisac
