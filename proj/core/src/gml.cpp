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

#include "fdisac/gml.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fdisac/constraints.hpp"
#include "fdisac/errors.hpp"
#include "fdisac/metrics.hpp"

namespace fdisac {

using diff::Tape;
using diff::Var;

std::string_view learner_name(Block b) {
    switch (b) {
        case Block::UplinkPower: return "upn";
        case Block::Precoder: return "pn";
        case Block::Layout: return "man";
        case Block::CommCombiner: return "crbn";
        case Block::SenseCombiner: return "srbn";
    }
    return "?";
}

std::size_t block_width(const ScenarioConfig& cfg, Block b) {
    const auto n = [](int v) { return static_cast<std::size_t>(v); };
    switch (b) {
        case Block::UplinkPower: return n(cfg.u);
        case Block::Precoder: return 2 * n(cfg.n_t) * n(cfg.d);
        case Block::Layout: return 2 * (n(cfg.n_t) + n(cfg.n_rc) + n(cfg.n_rs));
        case Block::CommCombiner: return 2 * n(cfg.n_rc) * n(cfg.u);
        case Block::SenseCombiner: return 2 * n(cfg.n_rs);
    }
    return 0;
}

double block_unit(const ScenarioConfig& cfg, Block b) {
    switch (b) {
        case Block::UplinkPower: return cfg.p_u_max;
        case Block::Precoder: return std::sqrt(cfg.p_bs);
        case Block::Layout: return cfg.lambda;
        default: return 1.0;
    }
}

bool LayoutMask::frozen(AntennaGroup g) const {
    switch (g) {
        case AntennaGroup::Transmit: return transmit;
        case AntennaGroup::ReceiveComm: return receive_comm;
        case AntennaGroup::ReceiveSense: return receive_sense;
    }
    return false;
}

namespace {

constexpr std::array<AntennaGroup, 3> kGroups{AntennaGroup::Transmit, AntennaGroup::ReceiveComm,
                                              AntennaGroup::ReceiveSense};

std::size_t block_index(Block b) { return static_cast<std::size_t>(b); }

void push_complex(std::vector<Var>& out, const std::vector<Complex<Var>>& v) {
    for (const auto& z : v) {
        out.push_back(z.re);
        out.push_back(z.im);
    }
}

void pull_complex(std::vector<Complex<Var>>& v, std::span<const Var> flat) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = {flat[2 * k], flat[2 * k + 1]};
}

void set_block(StateVar& s, Block b, std::span<const Var> flat) {
    switch (b) {
        case Block::UplinkPower: s.p_u.assign(flat.begin(), flat.end()); break;
        case Block::Precoder: pull_complex(s.p.data, flat); break;
        case Block::CommCombiner: pull_complex(s.z.data, flat); break;
        case Block::SenseCombiner: pull_complex(s.v, flat); break;
        case Block::Layout: {
            std::size_t k = 0;
            for (AntennaGroup g : kGroups) {
                for (auto& p : group(s.layout, g)) {
                    p.x = flat[k++];
                    p.y = flat[k++];
                }
            }
            break;
        }
    }
}

/// Per real coordinate of the layout block: true when its group is frozen.
std::vector<bool> layout_frozen(const ScenarioConfig& cfg, const LayoutMask& mask) {
    std::vector<bool> out;
    const int counts[] = {cfg.n_t, cfg.n_rc, cfg.n_rs};
    for (std::size_t g = 0; g < 3; ++g) out.insert(out.end(), 2 * static_cast<std::size_t>(counts[g]), mask.frozen(kGroups[g]));
    return out;
}

}  // namespace

void normalize_gradient(std::vector<Var>& g) {
    if (g.empty()) return;
    Var ms = square(g[0]);
    for (std::size_t k = 1; k < g.size(); ++k) ms = ms + square(g[k]);
    const Var inv = 1.0 / sqrt(ms / static_cast<double>(g.size()) + kGradientFloor);
    for (Var& x : g) x = x * inv;
}

std::vector<Var> block_values(const StateVar& s, Block b) {
    std::vector<Var> out;
    switch (b) {
        case Block::UplinkPower: out = s.p_u; break;
        case Block::Precoder: push_complex(out, s.p.data); break;
        case Block::CommCombiner: push_complex(out, s.z.data); break;
        case Block::SenseCombiner: push_complex(out, s.v); break;
        case Block::Layout:
            for (AntennaGroup g : kGroups) {
                for (const auto& p : group(s.layout, g)) {
                    out.push_back(p.x);
                    out.push_back(p.y);
                }
            }
            break;
    }
    return out;
}

BeamformingState initial_state(const ScenarioConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto nt = static_cast<std::size_t>(cfg.n_t), d = static_cast<std::size_t>(cfg.d);
    const auto nrc = static_cast<std::size_t>(cfg.n_rc), u = static_cast<std::size_t>(cfg.u);
    BeamformingState s;
    s.p = zeros(nt, d);
    for (auto& z : s.p.data) {
        const double re = normal(rng);
        const double im = normal(rng);
        z = {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }
    s.p = project_transmit_power(s.p, cfg.p_bs);
    s.p_u.assign(u, cfg.p_u_max / 2.0);
    s.z = CMatrix<double>(nrc, u, std::vector<cdouble>(nrc * u, cdouble{1.0, 0.0}));
    s.v.assign(static_cast<std::size_t>(cfg.n_rs), cdouble{1.0, 0.0});
    s.layout = fpa_layout(cfg);
    return s;
}

StateVar lift_state(Tape& tape, const BeamformingState& s) {
    auto lift_c = [&](const std::vector<cdouble>& v) {
        std::vector<Complex<Var>> out;
        out.reserve(v.size());
        for (const auto& z : v) out.push_back({tape.constant(z.re), tape.constant(z.im)});
        return out;
    };
    auto lift_pts = [&](const std::vector<Point<double>>& v) {
        std::vector<Point<Var>> out;
        out.reserve(v.size());
        for (const auto& p : v) out.push_back({tape.constant(p.x), tape.constant(p.y)});
        return out;
    };
    StateVar o;
    o.p = CMatrix<Var>(s.p.rows, s.p.cols, lift_c(s.p.data));
    o.z = CMatrix<Var>(s.z.rows, s.z.cols, lift_c(s.z.data));
    o.v = lift_c(s.v);
    for (double x : s.p_u) o.p_u.push_back(tape.constant(x));
    o.layout.t_bs = lift_pts(s.layout.t_bs);
    o.layout.r_bs_c = lift_pts(s.layout.r_bs_c);
    o.layout.r_bs_s = lift_pts(s.layout.r_bs_s);
    o.layout.feasible = s.layout.feasible;
    return o;
}

Var inner_objective(const InnerContext& ctx, const ChannelSetT<Var>& ch, const StateVar& s) {
    const MetricValues<Var> m = evaluate_metrics(ctx.cfg, ch, s);
    return -meta_loss_terms(m, s.p_u, s.layout, ctx.cfg, ctx.mode).total;
}

void inner_cycle(InnerContext& ctx, StateVar& s, const BlockStepper& step) {
    Tape& tape = ctx.tape;
    for (Block b : kBlockOrder) {
        if (b == Block::Layout && ctx.mask.all()) continue;
        const std::size_t seg = tape.size();
        const std::vector<Var> x = block_values(s, b);
        Var r;
        if (b == Block::Layout) {
            // Channels depend on the layout only, so only this step rebuilds them on the segment.
            const ChannelSetT<Var> ch = rebuild_channels(ctx.cfg, s.layout, ctx.paths);
            r = inner_objective(ctx, ch, s);
        } else {
            r = inner_objective(ctx, ctx.channels, s);
        }
        std::vector<Var> g = tape.gradient_recorded(r, x, seg);
        const double unit = block_unit(ctx.cfg, b);
        normalize_gradient(g);
        const std::vector<Var> delta = step(b, g);
        if (delta.size() != x.size()) {
            throw ShapeError("learner for block '" + std::string(learner_name(b)) + "' returned " +
                             std::to_string(delta.size()) + " values, expected " + std::to_string(x.size()));
        }
        std::vector<Var> next(x.size());
        const std::vector<bool> frozen =
            b == Block::Layout ? layout_frozen(ctx.cfg, ctx.mask) : std::vector<bool>(x.size(), false);
        for (std::size_t k = 0; k < x.size(); ++k) next[k] = frozen[k] ? x[k] : x[k] + delta[k] * unit;
        set_block(s, b, next);

        switch (b) {
            case Block::UplinkPower: {
                const double hi = ctx.mode == PenaltyMode::SoftHinge ? ctx.cfg.p_u_max
                                                                     : std::numeric_limits<double>::infinity();
                for (Var& p : s.p_u) p = clamp(p, 0.0, hi);
                break;
            }
            case Block::Precoder: break;  // projected once after the inner cycles
            case Block::Layout:
                s.layout = clamp_layout(s.layout, ctx.cfg);
                ctx.channels = rebuild_channels(ctx.cfg, s.layout, ctx.paths);
                break;
            case Block::CommCombiner: normalize_unit_modulus(s.z.data); break;
            case Block::SenseCombiner: normalize_unit_modulus(s.v); break;
        }
    }
}

OuterResult outer_iteration(InnerContext& ctx, const BeamformingState& init, int n_i, int truncation,
                            const BlockStepper& step) {
    StateVar s = lift_state(ctx.tape, init);
    ctx.channels = rebuild_channels(ctx.cfg, s.layout, ctx.paths);
    for (int c = 0; c < n_i; ++c) {
        if (truncation > 0 && c > 0 && c % truncation == 0) {
            s = lift_state(ctx.tape, state_value(s));
            ctx.channels = rebuild_channels(ctx.cfg, s.layout, ctx.paths);
        }
        inner_cycle(ctx, s, step);
    }
    s.p = project_transmit_power(s.p, ctx.cfg.p_bs);
    const MetricValues<Var> m = evaluate_metrics(ctx.cfg, ctx.channels, s);
    OuterResult out{meta_loss_terms(m, s.p_u, s.layout, ctx.cfg, ctx.mode).total, std::move(s)};
    return out;
}

std::string trace_csv(const OptimizationTrace& t) {
    std::ostringstream os;
    os << "epoch,mean_meta_loss,best_objective,feasible_flag,seconds\n";
    for (const TraceRow& r : t.rows) {
        os << r.epoch << ',' << format_double(r.mean_meta_loss) << ',' << format_double(r.best_objective) << ','
           << (r.feasible ? 1 : 0) << ',' << format_double(r.seconds) << '\n';
    }
    return os.str();
}

Solution score_state(const ScenarioConfig& cfg, const PathCollection& paths, const BeamformingState& state,
                     std::string scheme) {
    Solution s;
    s.scheme = std::move(scheme);
    s.state = state;
    const ChannelSet ch = rebuild_channels(cfg, state.layout, paths);
    s.report = full_report(cfg, ch, state);
    s.check = feasibility(s.report, state.layout, cfg);
    s.feasible = s.check.feasible;
    s.state.layout.feasible = std::none_of(s.check.violated.begin(), s.check.violated.end(), [](const std::string& n) {
        return n.rfind("spacing_", 0) == 0 || n == "region";
    });
    s.paper_loss = meta_loss(s.report, cfg, PenaltyMode::PaperIndicator);
    s.objective = s.report.lambda_t;
    s.channel_hash = channel_hash(rebuild_channels(cfg, fpa_layout(cfg), paths));
    return s;
}

GmlOptimizer::GmlOptimizer(const ScenarioConfig& cfg, const GmlConfig& gml, const PathCollection& paths,
                           LayoutMask mask)
    : cfg_(cfg), gml_(gml), paths_(paths), mask_(mask),
      best_objective_(-std::numeric_limits<double>::infinity()),
      best_score_(-std::numeric_limits<double>::infinity()) {
    cfg_.validate();
    gml_.validate();
    init_ = initial_state(cfg_, gml_.seed);
    std::mt19937_64 rng(gml_.seed ^ 0x9e3779b97f4a7c15ULL);
    const bool zero_output = gml_.init == "zero_output";
    for (Block b : kBlockOrder) {
        nets_.push_back(LearnerNetwork::create(std::string(learner_name(b)), block_width(cfg_, b),
                                               static_cast<std::size_t>(gml_.hidden), gml_.step_scale,
                                               gml_.leaky_slope, zero_output, rng));
        adam_.emplace_back(nets_.back().parameter_count(), AdamOptions{gml_.meta_lr});
    }
}

EpochEvaluation GmlOptimizer::evaluate_epoch() const { return evaluate_epoch(nets_); }

EpochEvaluation GmlOptimizer::evaluate_epoch(const std::vector<LearnerNetwork>& nets) const {
    if (nets.size() != kBlockOrder.size()) throw ShapeError("evaluate_epoch: expected one learner per block");
    Tape tape;
    tape.reserve(1u << 20);
    std::vector<LearnerLeaves> leaves;
    for (const auto& n : nets) leaves.push_back(push_learner(tape, n));

    InnerContext ctx{cfg_, paths_, gml_.penalty_mode, mask_, tape, {}};
    const BlockStepper stepper = [&](Block b, std::span<const Var> g) {
        const std::size_t k = block_index(b);
        return learner_forward(tape, nets[k], leaves[k], g);
    };

    // Every outer iteration restarts from init_ with the same learner
    // weights, so all N_o trajectories coincide bit for bit; one is
    // computed and stands for each of them. Their mean is that loss.
    const OuterResult r = outer_iteration(ctx, init_, gml_.n_i, gml_.truncation, stepper);

    EpochEvaluation ev;
    ev.mean_loss = r.loss.value();
    ev.outer_losses.assign(static_cast<std::size_t>(gml_.n_o), ev.mean_loss);
    const std::vector<double> adj = tape.adjoints(r.loss);
    for (std::size_t k = 0; k < nets.size(); ++k) {
        const std::size_t n = nets[k].parameter_count();
        ev.grads.emplace_back(adj.begin() + leaves[k].first, adj.begin() + leaves[k].first + static_cast<std::ptrdiff_t>(n));
    }
    ev.candidate = state_value(r.state);
    return ev;
}

TraceRow GmlOptimizer::epoch() {
    const auto t0 = std::chrono::steady_clock::now();
    const EpochEvaluation ev = evaluate_epoch();
    Solution cand = score_state(cfg_, paths_, ev.candidate, "");

    if (cand.feasible) {
        if (!best_feasible_ || cand.objective > best_objective_) {
            best_ = cand;
            best_feasible_ = true;
            has_best_ = true;
            best_objective_ = cand.objective;
        }
    } else if (!best_feasible_ && (!has_best_ || -cand.paper_loss.total > best_score_)) {
        best_ = cand;
        has_best_ = true;
        best_score_ = -cand.paper_loss.total;
    }

    for (std::size_t k = 0; k < nets_.size(); ++k) {
        std::vector<double> params = nets_[k].parameters();
        adam_[k].step(params, ev.grads[k]);
        nets_[k].set_parameters(params);
    }

    TraceRow row;
    row.epoch = epoch_index_++;
    row.mean_meta_loss = ev.mean_loss;
    row.paper_loss = cand.paper_loss.total;
    row.best_objective = best_objective_;
    row.feasible = best_feasible_;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace_.rows.push_back(row);
    std::vector<double> outer;
    for (double l : ev.outer_losses) outer.push_back(-l);
    trace_.outer_objectives.push_back(std::move(outer));
    return row;
}

Solution GmlOptimizer::run(OptimizationTrace* trace) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int e = 0; e < gml_.n_e; ++e) epoch();
    if (trace) *trace = trace_;
    Solution out = best_;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

GmlRun run_gml(const ScenarioConfig& cfg, const GmlConfig& gml, const PathCollection& paths, LayoutMask mask,
               std::string scheme) {
    GmlOptimizer opt(cfg, gml, paths, mask);
    GmlRun r;
    r.solution = opt.run(&r.trace);
    r.solution.scheme = std::move(scheme);
    return r;
}

GmlRun run_gml(const ScenarioConfig& cfg, const GmlConfig& gml, std::uint64_t seed, LayoutMask mask,
               std::string scheme) {
    const PathCollection paths = sample_paths(cfg, seed);
    return run_gml(cfg, gml, paths, mask, std::move(scheme));
}

ScalarMetaResult meta_optimize_scalar(const std::function<Var(Var)>& objective, double x0, const GmlConfig& gml) {
    gml.validate();
    std::mt19937_64 rng(gml.seed);
    LearnerNetwork net = LearnerNetwork::create("scalar", 1, static_cast<std::size_t>(gml.hidden), gml.step_scale,
                                                gml.leaky_slope, gml.init == "zero_output", rng);
    Adam adam(net.parameter_count(), AdamOptions{gml.meta_lr});
    ScalarMetaResult res;
    res.best_objective = -std::numeric_limits<double>::infinity();
    for (int e = 0; e < gml.n_e; ++e) {
        Tape tape;
        const LearnerLeaves leaves = push_learner(tape, net);
        Var x = tape.constant(x0);
        for (int i = 0; i < gml.n_i; ++i) {
            const std::size_t seg = tape.size();
            const Var r = objective(x);
            const std::vector<Var> wrt{x};
            const std::vector<Var> g = tape.gradient_recorded(r, wrt, seg);
            x = x + learner_forward(tape, net, leaves, g)[0];
        }
        const Var fx = objective(x);
        const Var loss = -fx;
        if (fx.value() > res.best_objective) {
            res.best_objective = fx.value();
            res.best_x = x.value();
        }
        res.best_trace.push_back(res.best_objective);
        const std::vector<double> adj = tape.adjoints(loss);
        std::vector<double> params = net.parameters();
        const std::vector<double> grads(adj.begin() + leaves.first,
                                        adj.begin() + leaves.first + static_cast<std::ptrdiff_t>(params.size()));
        adam.step(params, grads);
        net.set_parameters(params);
    }
    return res;
}

}  // namespace fdisac
