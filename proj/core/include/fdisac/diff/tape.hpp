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

/// Reverse-mode differentiation over real scalars.
///
/// The tape is a flat list of elementary operations. Complex quantities are
/// carried as pairs of real variables (see complex.hpp), so the gradient of a
/// real objective with respect to a complex entry z = x + iy is read off as
/// dF/dx + i dF/dy, which is 2 dF/dz* (the steepest-ascent direction).
///
/// Two reverse sweeps are provided:
///   - adjoints(): plain numeric sweep over the whole tape;
///   - gradient_recorded(): a sweep restricted to a tape segment whose adjoint
///     arithmetic is itself appended to the tape, so the resulting gradients
///     can be differentiated again by a later plain sweep. This is what lets
///     the meta-learner backpropagate through gradient-fed update steps.
///
/// A tape is single-threaded; run one tape per worker.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace fdisac::diff {

enum class Op : std::uint8_t {
    Leaf,
    Const,
    Add,
    Sub,
    Mul,
    Div,
    Affine,     // da * a + offset
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Square,
    Piecewise,  // slope * a on the active branch (relu, clamp, abs, ...)
    DenseOut,
    DenseMarker,
};

std::string_view op_name(Op op);

class Tape;

struct Var {
    Tape* tape = nullptr;
    std::uint32_t id = 0;

    double value() const;
};

class Tape {
  public:
    static constexpr std::uint32_t kNone = 0xffffffffu;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var leaf(double v);
    Var constant(double v);

    std::size_t size() const { return op_.size(); }
    double value(std::uint32_t id) const { return val_[id]; }
    Op op(std::uint32_t id) const { return op_[id]; }
    void clear();
    void reserve(std::size_t n);

    /// Low-level node creation. Throws NumericFault when `v` is not finite.
    Var push(Op op, std::uint32_t a, std::uint32_t b, double da, double db, double v);

    /// Numeric reverse sweep seeded at `out`; returns adjoints for nodes [0, out.id].
    std::vector<double> adjoints(Var out) const;

    /// Convenience wrapper: d out / d w for each w.
    std::vector<double> gradient(Var out, std::span<const Var> wrt) const;

    /// Reverse sweep over the segment [segment_begin, out.id] whose adjoint
    /// computations are recorded as new tape nodes. Every `wrt` entry must lie
    /// before the segment; dependencies through other nodes before the
    /// segment are treated as constants. Throws UnsupportedOp when the segment
    /// contains an op without a recordable derivative (dense layers).
    std::vector<Var> gradient_recorded(Var out, std::span<const Var> wrt, std::size_t segment_begin);

    /// y = W x + b with W (rows x x.size(), row-major) and b stored as
    /// contiguous leaves starting at `w_first` and `b_first`.
    std::vector<Var> dense(std::span<const Var> x, std::uint32_t w_first, std::uint32_t b_first,
                           std::size_t rows);

  private:
    struct DenseRecord {
        std::vector<std::uint32_t> inputs;
        std::uint32_t w_first;
        std::uint32_t b_first;
        std::uint32_t out_first;
        std::uint32_t rows;
    };

    std::vector<Op> op_;
    std::vector<std::uint32_t> a_;
    std::vector<std::uint32_t> b_;
    std::vector<double> da_;
    std::vector<double> db_;
    std::vector<double> val_;
    std::vector<DenseRecord> dense_;
};

inline double Var::value() const { return tape->value(id); }

// ---- arithmetic ---------------------------------------------------------

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);

Var operator+(Var a, double c);
Var operator+(double c, Var a);
Var operator-(Var a, double c);
Var operator-(double c, Var a);
Var operator*(Var a, double c);
Var operator*(double c, Var a);
Var operator/(Var a, double c);
Var operator/(double c, Var a);

inline Var& operator+=(Var& a, Var b) { return a = a + b; }
inline Var& operator-=(Var& a, Var b) { return a = a - b; }
inline Var& operator*=(Var& a, Var b) { return a = a * b; }
inline Var& operator+=(Var& a, double c) { return a = a + c; }
inline Var& operator*=(Var& a, double c) { return a = a * c; }

Var exp(Var a);
Var log(Var a);
Var log2(Var a);
Var sin(Var a);
Var cos(Var a);
Var sqrt(Var a);
Var square(Var a);

/// max(0, a); subgradient 0 at the kink.
Var relu(Var a);
/// a for a > 0, slope * a otherwise.
Var leaky_relu(Var a, double slope);
/// Clamp into [lo, hi]; the clamped branch is a constant.
Var clamp(Var a, double lo, double hi);

inline double value_of(Var a) { return a.value(); }

/// A constant that lives on the same tape as `like`.
inline Var constant_like(Var like, double v) { return like.tape->constant(v); }

}  // namespace fdisac::diff
