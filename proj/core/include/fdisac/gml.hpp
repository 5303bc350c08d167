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

/// Gradient-based meta-learning optimizer.
///
/// Five learners (one per variable block) turn objective gradients into
/// additive updates. An outer iteration resets the blocks to the shared
/// initialization and runs N_i cyclic inner passes; the meta-loss of the
/// final state is backpropagated through the whole inner trajectory (the
/// inner gradients are themselves recorded on the tape) and one Adam step
/// updates all learners per epoch.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdisac/channel.hpp"
#include "fdisac/config.hpp"
#include "fdisac/learner.hpp"
#include "fdisac/solution.hpp"

namespace fdisac {

enum class Block { UplinkPower, Precoder, Layout, CommCombiner, SenseCombiner };

/// Update order within one inner cycle.
inline constexpr std::array<Block, 5> kBlockOrder{Block::UplinkPower, Block::Precoder, Block::Layout,
                                                  Block::CommCombiner, Block::SenseCombiner};

/// upn, pn, man, crbn, srbn.
std::string_view learner_name(Block b);

/// Real dimension of a block (complex entries count twice).
std::size_t block_width(const ScenarioConfig& cfg, Block b);

/// Natural unit of a block: learner deltas are multiplied by it before
/// being added.
double block_unit(const ScenarioConfig& cfg, Block b);

/// Antenna groups held at their initial positions.
struct LayoutMask {
    bool transmit = false;
    bool receive_comm = false;
    bool receive_sense = false;

    bool all() const { return transmit && receive_comm && receive_sense; }
    bool frozen(AntennaGroup g) const;
};

using StateVar = BeamformingStateT<diff::Var>;

/// Projected initialization: random Gaussian P scaled onto the budget,
/// P_u = P_u^max / 2, all-ones Z and V, reference grid layout.
BeamformingState initial_state(const ScenarioConfig& cfg, std::uint64_t seed);

StateVar lift_state(diff::Tape& tape, const BeamformingState& s);

/// Flatten a block into real scalars ([re, im] per complex entry; layout
/// as x, y per antenna in group order).
std::vector<diff::Var> block_values(const StateVar& s, Block b);

/// Added under the root of the mean square so an all-zero gradient stays
/// finite.
inline constexpr double kGradientFloor = 1e-30;

/// Divide a block gradient by its root mean square. Learners see unit-RMS
/// inputs whatever the block's natural scale.
void normalize_gradient(std::vector<diff::Var>& g);

/// Maps (block, normalized gradient) to a scaled delta of the same width.
using BlockStepper = std::function<std::vector<diff::Var>(Block, std::span<const diff::Var>)>;

struct InnerContext {
    const ScenarioConfig& cfg;
    const PathCollection& paths;
    PenaltyMode mode;
    LayoutMask mask;
    diff::Tape& tape;
    ChannelSetT<diff::Var> channels;  // consistent with the current layout
};

/// Inner objective: Lambda_t minus the penalties of `mode`.
diff::Var inner_objective(const InnerContext& ctx, const ChannelSetT<diff::Var>& ch, const StateVar& s);

/// One pass over all blocks in kBlockOrder with the per-block projections.
void inner_cycle(InnerContext& ctx, StateVar& s, const BlockStepper& step);

struct OuterResult {
    diff::Var loss;  // meta-loss in ctx.mode of the final state
    StateVar state;
};

/// Reset to `init`, run n_i inner cycles, project P, evaluate the loss.
/// `truncation` > 0 detaches the state from the tape every that many cycles.
OuterResult outer_iteration(InnerContext& ctx, const BeamformingState& init, int n_i, int truncation,
                            const BlockStepper& step);

struct TraceRow {
    int epoch = 0;
    double mean_meta_loss = 0.0;  // training-mode mean loss
    double paper_loss = 0.0;      // paper-indicator loss of the epoch's candidate
    double best_objective = 0.0;  // running max of feasible Lambda_t (-inf before any)
    bool feasible = false;        // a feasible candidate has been seen
    double seconds = 0.0;
};

struct OptimizationTrace {
    std::vector<TraceRow> rows;
    std::vector<std::vector<double>> outer_objectives;  // per epoch, -L^j per outer iteration
};

std::string trace_csv(const OptimizationTrace& t);

struct EpochEvaluation {
    double mean_loss = 0.0;
    std::vector<double> outer_losses;
    std::vector<std::vector<double>> grads;  // per learner, flattened like parameters()
    BeamformingState candidate;
};

class GmlOptimizer {
  public:
    GmlOptimizer(const ScenarioConfig& cfg, const GmlConfig& gml, const PathCollection& paths, LayoutMask mask = {});

    /// Loss and weight gradients for the current (or given) learners without
    /// updating anything.
    EpochEvaluation evaluate_epoch() const;
    EpochEvaluation evaluate_epoch(const std::vector<LearnerNetwork>& nets) const;

    /// One epoch: evaluate, track the best candidate, one Adam step.
    TraceRow epoch();

    /// Run all epochs and return the best state.
    Solution run(OptimizationTrace* trace = nullptr);

    const std::vector<LearnerNetwork>& nets() const { return nets_; }
    std::vector<LearnerNetwork>& nets() { return nets_; }
    const BeamformingState& init() const { return init_; }
    const Solution& best() const { return best_; }
    bool has_best() const { return has_best_; }

  private:
    const ScenarioConfig& cfg_;
    GmlConfig gml_;
    const PathCollection& paths_;
    LayoutMask mask_;
    BeamformingState init_;
    std::vector<LearnerNetwork> nets_;
    std::vector<Adam> adam_;
    int epoch_index_ = 0;
    double best_objective_;
    Solution best_;
    bool has_best_ = false;
    bool best_feasible_ = false;
    double best_score_;
    OptimizationTrace trace_;
};

struct GmlRun {
    Solution solution;
    OptimizationTrace trace;
};

/// Sample the realization for `seed` and run the optimizer on it.
GmlRun run_gml(const ScenarioConfig& cfg, const GmlConfig& gml, std::uint64_t seed, LayoutMask mask = {},
               std::string scheme = "ma");

/// Same on a given realization.
GmlRun run_gml(const ScenarioConfig& cfg, const GmlConfig& gml, const PathCollection& paths, LayoutMask mask = {},
               std::string scheme = "ma");

/// Meta-learning on a single real block with a caller-supplied objective to
/// maximize; used to check the training loop on closed-form problems.
struct ScalarMetaResult {
    double best_x = 0.0;
    double best_objective = 0.0;
    std::vector<double> best_trace;
};
ScalarMetaResult meta_optimize_scalar(const std::function<diff::Var(diff::Var)>& objective, double x0,
                                      const GmlConfig& gml);

}  // namespace fdisac
