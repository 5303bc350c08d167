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

#include <cstdint>
#include <string>

#include "fdisac/channel.hpp"
#include "fdisac/constraints.hpp"
#include "fdisac/metrics.hpp"

namespace fdisac {

/// A scored state. `objective` is Lambda_t; `feasible` comes from
/// constraints::feasibility on freshly rebuilt channels.
struct Solution {
    std::string scheme;
    BeamformingState state;
    MetricsReport report;
    FeasibilityResult check;
    MetaLossBreakdown paper_loss;
    double objective = 0.0;
    bool feasible = false;
    std::uint64_t channel_hash = 0;
    double seconds = 0.0;
};

Solution score_state(const ScenarioConfig& cfg, const PathCollection& paths, const BeamformingState& state,
                     std::string scheme);

}  // namespace fdisac
