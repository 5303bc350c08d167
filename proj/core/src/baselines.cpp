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

#include "fdisac/baselines.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fdisac/constraints.hpp"
#include "fdisac/errors.hpp"
#include "fdisac/metrics.hpp"

namespace fdisac {

using diff::Tape;
using diff::Var;

std::string to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::NlpSolver: return "nlp";
        case BaselineKind::MaFdOnly: return "ma_fd_only";
        case BaselineKind::FpaBoth: return "fpa_both";
    }
    return "?";
}

void BaselineSpec::validate() const {
    nlp.validate();
    gml.validate();
}

LayoutMask mask_for(BaselineKind k) {
    LayoutMask m;
    if (k == BaselineKind::MaFdOnly) m.receive_sense = true;
    if (k == BaselineKind::FpaBoth) m.transmit = m.receive_comm = m.receive_sense = true;
    return m;
}

namespace {

template <class T>
T squared_shortfall(const T& q, double threshold) {
    const double scale = threshold > 0.0 ? threshold : 1.0;
    return square(relu(threshold - q) / scale);
}

template <class T>
T penalized(const ScenarioConfig& cfg, const ChannelSetT<T>& ch, const BeamformingStateT<T>& s, double weight) {
    const MetricValues<T> m = evaluate_metrics(cfg, ch, s);
    T pen = squared_shortfall(m.lambda_t, cfg.lambda_th_s);
    for (const T& r : m.r_d) pen = pen + squared_shortfall(r, cfg.r_th_d);
    for (const T& r : m.r_u) pen = pen + squared_shortfall(r, cfg.r_th_u);
    return m.lambda_t - pen * weight;
}

StateVar leaf_state(Tape& tape, const BeamformingState& s) {
    auto leaf_c = [&](const std::vector<cdouble>& v) {
        std::vector<Complex<Var>> out;
        for (const auto& z : v) out.push_back({tape.leaf(z.re), tape.leaf(z.im)});
        return out;
    };
    auto leaf_pts = [&](const std::vector<Point<double>>& v) {
        std::vector<Point<Var>> out;
        for (const auto& p : v) out.push_back({tape.leaf(p.x), tape.leaf(p.y)});
        return out;
    };
    StateVar o;
    o.p = CMatrix<Var>(s.p.rows, s.p.cols, leaf_c(s.p.data));
    o.z = CMatrix<Var>(s.z.rows, s.z.cols, leaf_c(s.z.data));
    o.v = leaf_c(s.v);
    for (double x : s.p_u) o.p_u.push_back(tape.leaf(x));
    o.layout.t_bs = leaf_pts(s.layout.t_bs);
    o.layout.r_bs_c = leaf_pts(s.layout.r_bs_c);
    o.layout.r_bs_s = leaf_pts(s.layout.r_bs_s);
    return o;
}

/// Flat real view of a double state in kBlockOrder, and its inverse.
std::vector<double> flatten(const BeamformingState& s) {
    std::vector<double> out(s.p_u);
    for (const auto& z : s.p.data) out.insert(out.end(), {z.re, z.im});
    for (AntennaGroup g : {AntennaGroup::Transmit, AntennaGroup::ReceiveComm, AntennaGroup::ReceiveSense}) {
        for (const auto& p : group(s.layout, g)) out.insert(out.end(), {p.x, p.y});
    }
    for (const auto& z : s.z.data) out.insert(out.end(), {z.re, z.im});
    for (const auto& z : s.v) out.insert(out.end(), {z.re, z.im});
    return out;
}

BeamformingState unflatten(const BeamformingState& shape, const std::vector<double>& x) {
    BeamformingState s = shape;
    std::size_t k = 0;
    for (double& p : s.p_u) p = x[k++];
    for (auto& z : s.p.data) z = {x[k], x[k + 1]}, k += 2;
    for (AntennaGroup g : {AntennaGroup::Transmit, AntennaGroup::ReceiveComm, AntennaGroup::ReceiveSense}) {
        for (auto& p : group(s.layout, g)) p = {x[k], x[k + 1]}, k += 2;
    }
    for (auto& z : s.z.data) z = {x[k], x[k + 1]}, k += 2;
    for (auto& z : s.v) z = {x[k], x[k + 1]}, k += 2;
    return s;
}

struct BlockRange {
    std::size_t begin;
    std::size_t end;
    double unit;
    bool layout;
};

std::vector<BlockRange> block_ranges(const ScenarioConfig& cfg) {
    std::vector<BlockRange> out;
    std::size_t at = 0;
    for (Block b : kBlockOrder) {
        const std::size_t w = block_width(cfg, b);
        out.push_back({at, at + w, block_unit(cfg, b), b == Block::Layout});
        at += w;
    }
    return out;
}

std::vector<double> gradient_of(const ScenarioConfig& cfg, const PathCollection& paths, const BeamformingState& s,
                                double weight) {
    Tape tape;
    const StateVar sv = leaf_state(tape, s);
    const ChannelSetT<Var> ch = rebuild_channels(cfg, sv.layout, paths);
    const Var f = penalized(cfg, ch, sv, weight);
    const std::vector<double> adj = tape.adjoints(f);
    std::vector<double> g;
    for (Block b : kBlockOrder) {
        for (const Var& v : block_values(sv, b)) g.push_back(adj[v.id]);
    }
    return g;
}

BeamformingState random_start(const ScenarioConfig& cfg, std::mt19937_64& rng, const LayoutMask& mask) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    BeamformingState s = initial_state(cfg, rng());
    for (auto& z : s.p.data) z = {normal(rng), normal(rng)};
    s.p = project_transmit_power(s.p, cfg.p_bs);
    for (double& p : s.p_u) p = cfg.p_u_max * unit(rng);
    auto phase = [&] {
        const double a = 2.0 * std::numbers::pi * unit(rng);
        return cdouble{std::cos(a), std::sin(a)};
    };
    for (auto& z : s.z.data) z = phase();
    for (auto& z : s.v) z = phase();
    const double jitter = 0.25 * cfg.lambda;
    for (AntennaGroup g : {AntennaGroup::Transmit, AntennaGroup::ReceiveComm, AntennaGroup::ReceiveSense}) {
        for (auto& p : group(s.layout, g)) {
            const double dx = jitter * (2.0 * unit(rng) - 1.0);
            const double dy = jitter * (2.0 * unit(rng) - 1.0);
            if (!mask.frozen(g)) p = {p.x + dx, p.y + dy};
        }
    }
    s.layout = clamp_layout(s.layout, cfg);
    return s;
}

struct Tracker {
    bool has_feasible = false;
    bool has_any = false;
    double best_feasible = -std::numeric_limits<double>::infinity();
    double best_score = -std::numeric_limits<double>::infinity();
    Solution feasible;
    Solution fallback;

    void offer(Solution&& s) {
        if (s.feasible) {
            if (!has_feasible || s.objective > best_feasible) {
                best_feasible = s.objective;
                feasible = std::move(s);
                has_feasible = true;
            }
            return;
        }
        const double score = -s.paper_loss.total;
        if (!has_any || score > best_score) {
            best_score = score;
            fallback = std::move(s);
            has_any = true;
        }
    }
};

}  // namespace

double penalized_objective(const ScenarioConfig& cfg, const ChannelSet& ch, const BeamformingState& s, double weight) {
    return penalized(cfg, ch, s, weight);
}

BeamformingState project_state(const ScenarioConfig& cfg, const BeamformingState& s) {
    BeamformingState o = s;
    o.p = project_transmit_power(o.p, cfg.p_bs);
    for (double& p : o.p_u) p = clamp(p, 0.0, cfg.p_u_max);
    normalize_receive_beams(o.z, o.v);
    o.layout = clamp_layout(o.layout, cfg);
    return o;
}

Solution solve_nlp(const ScenarioConfig& cfg, const PathCollection& paths, const NlpOptions& opt, std::uint64_t seed,
                   LayoutMask mask) {
    cfg.validate();
    opt.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<BlockRange> ranges = block_ranges(cfg);
    const BeamformingState reference = initial_state(cfg, seed);

    // Per-coordinate freeze flags for the layout block.
    std::vector<bool> frozen(flatten(reference).size(), false);
    {
        std::size_t k = ranges[static_cast<std::size_t>(Block::Layout)].begin;
        const int counts[] = {cfg.n_t, cfg.n_rc, cfg.n_rs};
        const AntennaGroup groups[] = {AntennaGroup::Transmit, AntennaGroup::ReceiveComm, AntennaGroup::ReceiveSense};
        for (int g = 0; g < 3; ++g) {
            for (int c = 0; c < 2 * counts[g]; ++c) frozen[k++] = mask.frozen(groups[g]);
        }
    }

    Tracker best;
    for (int r = 0; r < opt.restarts; ++r) {
        std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(sq);
        BeamformingState s = r == 0 ? reference : random_start(cfg, rng, mask);
        s = project_state(cfg, s);

        Tracker local;
        auto score = [&](const BeamformingState& st) { local.offer(score_state(cfg, paths, st, "nlp")); };
        score(s);

        double weight = opt.penalty_initial;
        for (int stage = 0; stage < opt.stages; ++stage, weight *= opt.penalty_growth) {
            double f = penalized(cfg, rebuild_channels(cfg, s.layout, paths), s, weight);
            double t = opt.step_size;
            for (int it = 0; it < opt.steps_per_stage; ++it) {
                const std::vector<double> g = gradient_of(cfg, paths, s, weight);
                const std::vector<double> x = flatten(s);
                // Normalized ascent direction per block, in the block's units.
                std::vector<double> dir(x.size(), 0.0);
                for (const BlockRange& br : ranges) {
                    double n2 = 0.0;
                    for (std::size_t k = br.begin; k < br.end; ++k) {
                        if (!frozen[k]) n2 += square(g[k] * br.unit);
                    }
                    if (!(n2 > 0.0)) continue;
                    const double scale = std::sqrt(static_cast<double>(br.end - br.begin) / n2);
                    for (std::size_t k = br.begin; k < br.end; ++k) {
                        if (!frozen[k]) dir[k] = g[k] * br.unit * scale * br.unit;
                    }
                }
                bool accepted = false;
                for (int ls = 0; ls < 12 && !accepted; ++ls, t *= 0.5) {
                    std::vector<double> y = x;
                    for (std::size_t k = 0; k < y.size(); ++k) y[k] += t * dir[k];
                    BeamformingState cand;
                    try {
                        cand = project_state(cfg, unflatten(s, y));
                    } catch (const InfeasibleLayout&) {
                        continue;
                    }
                    const double fc = penalized(cfg, rebuild_channels(cfg, cand.layout, paths), cand, weight);
                    if (fc > f) {
                        s = std::move(cand);
                        f = fc;
                        accepted = true;
                    }
                }
                if (accepted) {
                    t = std::min(4.0 * t, opt.step_size);
                    score(s);
                } else {
                    t = opt.step_size;
                    break;  // stalled at this weight; move to the next stage
                }
            }
        }
        if (local.has_feasible) best.offer(std::move(local.feasible));
        if (local.has_any) best.offer(std::move(local.fallback));
    }

    Solution out = best.has_feasible ? std::move(best.feasible) : std::move(best.fallback);
    out.scheme = "nlp";
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

Solution solve_fpa_variants(const ScenarioConfig& cfg, const PathCollection& paths, const BaselineSpec& spec) {
    if (spec.kind == BaselineKind::NlpSolver) throw ConfigError("solve_fpa_variants: nlp is not a fixed-position variant");
    return run_gml(cfg, spec.gml, paths, mask_for(spec.kind), to_string(spec.kind)).solution;
}

Solution solve_baseline(const ScenarioConfig& cfg, const PathCollection& paths, const BaselineSpec& spec,
                        std::uint64_t seed) {
    spec.validate();
    if (spec.kind == BaselineKind::NlpSolver) return solve_nlp(cfg, paths, spec.nlp, seed);
    return solve_fpa_variants(cfg, paths, spec);
}

}  // namespace fdisac
