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

/// Gradient-fed learner networks and the Adam meta-optimizer.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fdisac/diff/tape.hpp"

namespace fdisac {

/// delta = step_scale * (W2 leaky(W1 g + b1) + b2). Input and output width
/// both equal the real dimension of the driven block.
struct LearnerNetwork {
    std::string id;
    std::size_t width = 0;
    std::size_t hidden = 0;
    double step_scale = 1.0;
    double slope = 0.01;
    std::vector<double> w1;  // hidden x width, row-major
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // width x hidden, row-major
    std::vector<double> b2;  // width

    /// Weights flattened as [w1, b1, w2, b2].
    std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> flat);
    void validate() const;

    /// Hidden layer ~ N(0, 1/width). The output layer is zero when
    /// `zero_output`, else ~ N(0, 1/hidden). Biases start at zero.
    static LearnerNetwork create(std::string id, std::size_t width, std::size_t hidden, double step_scale,
                                 double slope, bool zero_output, std::mt19937_64& rng);
};

std::vector<double> learner_forward(const LearnerNetwork& net, std::span<const double> grad);

/// Ids of the network's weights once pushed as tape leaves.
struct LearnerLeaves {
    std::uint32_t first = 0;  // [w1, b1, w2, b2] are contiguous from here
    std::uint32_t w1 = 0;
    std::uint32_t b1 = 0;
    std::uint32_t w2 = 0;
    std::uint32_t b2 = 0;
};

LearnerLeaves push_learner(diff::Tape& tape, const LearnerNetwork& net);

std::vector<diff::Var> learner_forward(diff::Tape& tape, const LearnerNetwork& net, const LearnerLeaves& leaves,
                                       std::span<const diff::Var> grad);

struct AdamOptions {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
  public:
    Adam() = default;
    Adam(std::size_t n, AdamOptions opt) : opt_(opt), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::span<double> params, std::span<const double> grads);
    long steps() const { return t_; }

  private:
    AdamOptions opt_;
    std::vector<double> m_;
    std::vector<double> v_;
    long t_ = 0;
};

}  // namespace fdisac
