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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdisac {

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path(path) {}
    std::string path;
};

/// No layout satisfying the spacing rule could be produced inside the region.
struct InfeasibleLayout : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A forward value became NaN or infinite. `node` is the tape position of the
/// offending operation, `op` its name.
struct NumericFault : std::runtime_error {
    NumericFault(std::string op_name, std::size_t node_id, std::string block = {})
        : std::runtime_error("numeric fault in op '" + op_name + "' at node " + std::to_string(node_id) +
                             (block.empty() ? std::string{} : " (block " + block + ")")),
          op(std::move(op_name)), node(node_id), block(std::move(block)) {}
    std::string op;
    std::size_t node;
    std::string block;
};

struct UnsupportedOp : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Too many realizations failed at one sweep point.
struct SweepError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fdisac
