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

#include "fdisac/diff/blocks.hpp"

#include <functional>
#include <numeric>

#include "fdisac/errors.hpp"

namespace fdisac::diff {

std::size_t ParameterBlock::count() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void ParameterBlock::validate() const {
    if (values.size() != real_size()) {
        throw ShapeError("block '" + id + "': shape product " + std::to_string(count()) + " does not match " +
                         std::to_string(values.size()) + " stored values");
    }
}

ParameterBlock ParameterBlock::real(std::string id, std::vector<std::size_t> shape, std::vector<double> values) {
    ParameterBlock b{std::move(id), BlockKind::Real, std::move(shape), std::move(values)};
    b.validate();
    return b;
}

ParameterBlock ParameterBlock::complex(std::string id, std::vector<std::size_t> shape,
                                       const std::vector<cdouble>& values) {
    ParameterBlock b{std::move(id), BlockKind::Complex, std::move(shape), {}};
    b.values.reserve(2 * values.size());
    for (const cdouble& z : values) {
        b.values.push_back(z.re);
        b.values.push_back(z.im);
    }
    b.validate();
    return b;
}

const ParameterBlock& GradientBundle::operator[](const std::string& id) const {
    for (const auto& b : blocks) {
        if (b.id == id) return b;
    }
    throw ShapeError("no gradient for block '" + id + "'");
}

cdouble GradientBundle::complex_entry(const std::string& id, std::size_t i) const {
    const ParameterBlock& b = (*this)[id];
    if (b.kind != BlockKind::Complex) throw ShapeError("block '" + id + "' is real");
    return {b.values[2 * i], b.values[2 * i + 1]};
}

namespace {

std::vector<BlockVars> make_vars(Tape& tape, std::span<const ParameterBlock> blocks) {
    std::vector<BlockVars> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) {
        b.validate();
        BlockVars bv;
        bv.block = &b;
        bv.vars.reserve(b.values.size());
        for (double v : b.values) bv.vars.push_back(tape.leaf(v));
        out.push_back(std::move(bv));
    }
    return out;
}

}  // namespace

ValueAndGradient evaluate_with_gradient(const Program& program, std::span<const ParameterBlock> blocks) {
    Tape tape;
    const std::vector<BlockVars> vars = make_vars(tape, blocks);
    const Var out = program(tape, vars);
    const std::vector<double> adj = tape.adjoints(out);

    ValueAndGradient r;
    r.value = out.value();
    r.grads.blocks.reserve(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        ParameterBlock g{blocks[k].id, blocks[k].kind, blocks[k].shape, {}};
        g.values.reserve(vars[k].vars.size());
        for (const Var& v : vars[k].vars) g.values.push_back(v.id <= out.id ? adj[v.id] : 0.0);
        r.grads.blocks.push_back(std::move(g));
    }
    return r;
}

double evaluate(const Program& program, std::span<const ParameterBlock> blocks) {
    Tape tape;
    const std::vector<BlockVars> vars = make_vars(tape, blocks);
    return program(tape, vars).value();
}

GradientBundle finite_difference_gradient(const Program& program, std::span<const ParameterBlock> blocks,
                                          double step) {
    if (!(step > 0.0)) throw ShapeError("finite_difference_gradient: step must be positive");
    std::vector<ParameterBlock> work(blocks.begin(), blocks.end());
    GradientBundle out;
    for (std::size_t k = 0; k < work.size(); ++k) {
        ParameterBlock g{work[k].id, work[k].kind, work[k].shape, std::vector<double>(work[k].values.size())};
        for (std::size_t i = 0; i < work[k].values.size(); ++i) {
            const double x0 = work[k].values[i];
            work[k].values[i] = x0 + step;
            const double fp = evaluate(program, work);
            work[k].values[i] = x0 - step;
            const double fm = evaluate(program, work);
            work[k].values[i] = x0;
            g.values[i] = (fp - fm) / (2.0 * step);
        }
        out.blocks.push_back(std::move(g));
    }
    return out;
}

}  // namespace fdisac::diff
