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

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fdisac/diff/complex.hpp"
#include "fdisac/diff/tape.hpp"

namespace fdisac::diff {

enum class BlockKind { Real, Complex };

/// A named, shaped array of optimization parameters. Complex blocks store
/// interleaved (re, im) pairs, so `values.size() == 2 * count()`.
struct ParameterBlock {
    std::string id;
    BlockKind kind = BlockKind::Real;
    std::vector<std::size_t> shape;
    std::vector<double> values;

    std::size_t count() const;
    std::size_t real_size() const { return kind == BlockKind::Complex ? 2 * count() : count(); }
    void validate() const;

    static ParameterBlock real(std::string id, std::vector<std::size_t> shape, std::vector<double> values);
    static ParameterBlock complex(std::string id, std::vector<std::size_t> shape, const std::vector<cdouble>& values);
};

/// Taped view of a ParameterBlock handed to a program.
struct BlockVars {
    const ParameterBlock* block = nullptr;
    std::vector<Var> vars;

    Var real(std::size_t i) const { return vars[i]; }
    Complex<Var> complex(std::size_t i) const { return {vars[2 * i], vars[2 * i + 1]}; }
    std::size_t count() const { return block->count(); }
};

/// Gradients per block. For complex blocks the entry is dF/dRe + i dF/dIm
/// (the conjugate-Wirtinger gradient 2 dF/dz*); real blocks stay real.
struct GradientBundle {
    std::vector<ParameterBlock> blocks;

    const ParameterBlock& operator[](const std::string& id) const;
    cdouble complex_entry(const std::string& id, std::size_t i) const;
};

using Program = std::function<Var(Tape&, std::span<const BlockVars>)>;

struct ValueAndGradient {
    double value = 0.0;
    GradientBundle grads;
};

ValueAndGradient evaluate_with_gradient(const Program& program, std::span<const ParameterBlock> blocks);

/// Central differences on every real coordinate. Forward values only; shares
/// nothing with the reverse sweep beyond operation evaluation.
GradientBundle finite_difference_gradient(const Program& program, std::span<const ParameterBlock> blocks,
                                          double step);

/// Forward evaluation of a program on a fresh tape.
double evaluate(const Program& program, std::span<const ParameterBlock> blocks);

}  // namespace fdisac::diff
