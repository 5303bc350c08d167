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

/// Comparison schemes: a multi-start penalized projected-gradient solver
/// standing in for a general NLP solver, and the fixed-position variants
/// run through the meta-learning optimizer with frozen layout groups.

#include <cstdint>
#include <string>

#include "fdisac/config.hpp"
#include "fdisac/gml.hpp"
#include "fdisac/solution.hpp"

namespace fdisac {

enum class BaselineKind { NlpSolver, MaFdOnly, FpaBoth };

std::string to_string(BaselineKind k);

struct BaselineSpec {
    BaselineKind kind = BaselineKind::NlpSolver;
    NlpOptions nlp;
    GmlConfig gml;

    void validate() const;
};

/// Penalized objective used by the solver: Lambda_t minus
/// weight * sum of squared normalized QoS shortfalls.
double penalized_objective(const ScenarioConfig& cfg, const ChannelSet& ch, const BeamformingState& s, double weight);

/// Projection onto the hard constraints: power budget, P_u box, unit
/// modulus combiners, region and spacing.
BeamformingState project_state(const ScenarioConfig& cfg, const BeamformingState& s);

/// Multi-start ascent. Restart 0 starts from initial_state(cfg, seed), the
/// others from random points. Returns the best feasible iterate over all
/// restarts (lowest restart index on ties), else the best-effort state
/// flagged infeasible.
Solution solve_nlp(const ScenarioConfig& cfg, const PathCollection& paths, const NlpOptions& opt, std::uint64_t seed,
                   LayoutMask mask = {});

/// ma_fd_only freezes the BS R receive group; fpa_both freezes all groups.
Solution solve_fpa_variants(const ScenarioConfig& cfg, const PathCollection& paths, const BaselineSpec& spec);

Solution solve_baseline(const ScenarioConfig& cfg, const PathCollection& paths, const BaselineSpec& spec,
                        std::uint64_t seed);

LayoutMask mask_for(BaselineKind k);

}  // namespace fdisac
