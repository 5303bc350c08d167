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

#include "fdisac/learner.hpp"

#include <cmath>

#include "fdisac/diff/complex.hpp"
#include "fdisac/errors.hpp"

namespace fdisac {

using diff::Var;

std::vector<double> LearnerNetwork::parameters() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    out.insert(out.end(), w1.begin(), w1.end());
    out.insert(out.end(), b1.begin(), b1.end());
    out.insert(out.end(), w2.begin(), w2.end());
    out.insert(out.end(), b2.begin(), b2.end());
    return out;
}

void LearnerNetwork::set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        throw ShapeError("learner '" + id + "': expected " + std::to_string(parameter_count()) + " parameters, got " +
                         std::to_string(flat.size()));
    }
    auto it = flat.begin();
    for (auto* vec : {&w1, &b1, &w2, &b2}) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(vec->size()), vec->begin());
        it += static_cast<std::ptrdiff_t>(vec->size());
    }
}

void LearnerNetwork::validate() const {
    if (w1.size() != hidden * width || b1.size() != hidden || w2.size() != width * hidden || b2.size() != width) {
        throw ShapeError("learner '" + id + "': weight shapes do not match width " + std::to_string(width) +
                         " and hidden " + std::to_string(hidden));
    }
    for (const auto* vec : {&w1, &b1, &w2, &b2}) {
        for (double x : *vec) {
            if (!std::isfinite(x)) throw NumericFault("learner weight", 0, id);
        }
    }
}

LearnerNetwork LearnerNetwork::create(std::string id, std::size_t width, std::size_t hidden, double step_scale,
                                      double slope, bool zero_output, std::mt19937_64& rng) {
    LearnerNetwork n;
    n.id = std::move(id);
    n.width = width;
    n.hidden = hidden;
    n.step_scale = step_scale;
    n.slope = slope;
    std::normal_distribution<double> normal(0.0, 1.0);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(width));
    n.w1.resize(hidden * width);
    for (double& w : n.w1) w = s1 * normal(rng);
    n.b1.assign(hidden, 0.0);
    n.w2.assign(width * hidden, 0.0);
    if (!zero_output) {
        const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
        for (double& w : n.w2) w = s2 * normal(rng);
    }
    n.b2.assign(width, 0.0);
    return n;
}

std::vector<double> learner_forward(const LearnerNetwork& net, std::span<const double> grad) {
    if (grad.size() != net.width) {
        throw ShapeError("learner '" + net.id + "': input width " + std::to_string(grad.size()) + ", expected " +
                         std::to_string(net.width));
    }
    std::vector<double> h(net.hidden);
    for (std::size_t r = 0; r < net.hidden; ++r) {
        double s = net.b1[r];
        for (std::size_t c = 0; c < net.width; ++c) s += net.w1[r * net.width + c] * grad[c];
        h[r] = leaky_relu(s, net.slope);
    }
    std::vector<double> out(net.width);
    for (std::size_t r = 0; r < net.width; ++r) {
        double s = net.b2[r];
        for (std::size_t c = 0; c < net.hidden; ++c) s += net.w2[r * net.hidden + c] * h[c];
        out[r] = net.step_scale * s;
    }
    return out;
}

LearnerLeaves push_learner(diff::Tape& tape, const LearnerNetwork& net) {
    net.validate();
    LearnerLeaves l;
    l.first = static_cast<std::uint32_t>(tape.size());
    l.w1 = l.first;
    for (double w : net.w1) tape.leaf(w);
    l.b1 = static_cast<std::uint32_t>(tape.size());
    for (double w : net.b1) tape.leaf(w);
    l.w2 = static_cast<std::uint32_t>(tape.size());
    for (double w : net.w2) tape.leaf(w);
    l.b2 = static_cast<std::uint32_t>(tape.size());
    for (double w : net.b2) tape.leaf(w);
    return l;
}

std::vector<Var> learner_forward(diff::Tape& tape, const LearnerNetwork& net, const LearnerLeaves& leaves,
                                 std::span<const Var> grad) {
    if (grad.size() != net.width) {
        throw ShapeError("learner '" + net.id + "': input width " + std::to_string(grad.size()) + ", expected " +
                         std::to_string(net.width));
    }
    std::vector<Var> h = tape.dense(grad, leaves.w1, leaves.b1, net.hidden);
    for (Var& x : h) x = leaky_relu(x, net.slope);
    std::vector<Var> out = tape.dense(h, leaves.w2, leaves.b2, net.width);
    for (Var& x : out) x = x * net.step_scale;
    return out;
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw ShapeError("Adam: parameter count " + std::to_string(params.size()) + " does not match state " +
                         std::to_string(m_.size()));
    }
    ++t_;
    const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = grads[k];
        m_[k] = opt_.beta1 * m_[k] + (1.0 - opt_.beta1) * g;
        v_[k] = opt_.beta2 * v_[k] + (1.0 - opt_.beta2) * g * g;
        params[k] -= opt_.lr * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + opt_.eps);
    }
}

}  // namespace fdisac
