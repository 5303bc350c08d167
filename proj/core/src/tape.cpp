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

#include "fdisac/diff/tape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fdisac/errors.hpp"

namespace fdisac::diff {

std::string_view op_name(Op op) {
    switch (op) {
        case Op::Leaf: return "leaf";
        case Op::Const: return "const";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::Div: return "div";
        case Op::Affine: return "affine";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Sqrt: return "sqrt";
        case Op::Square: return "square";
        case Op::Piecewise: return "piecewise";
        case Op::DenseOut: return "dense";
        case Op::DenseMarker: return "dense";
    }
    return "unknown";
}

void Tape::clear() {
    op_.clear();
    a_.clear();
    b_.clear();
    da_.clear();
    db_.clear();
    val_.clear();
    dense_.clear();
}

void Tape::reserve(std::size_t n) {
    op_.reserve(n);
    a_.reserve(n);
    b_.reserve(n);
    da_.reserve(n);
    db_.reserve(n);
    val_.reserve(n);
}

Var Tape::push(Op op, std::uint32_t a, std::uint32_t b, double da, double db, double v) {
    const auto id = static_cast<std::uint32_t>(op_.size());
    if (!std::isfinite(v)) throw NumericFault(std::string(op_name(op)), id);
    op_.push_back(op);
    a_.push_back(a);
    b_.push_back(b);
    da_.push_back(da);
    db_.push_back(db);
    val_.push_back(v);
    return Var{this, id};
}

Var Tape::leaf(double v) { return push(Op::Leaf, kNone, kNone, 0.0, 0.0, v); }
Var Tape::constant(double v) { return push(Op::Const, kNone, kNone, 0.0, 0.0, v); }

std::vector<double> Tape::adjoints(Var out) const {
    std::vector<double> adj(static_cast<std::size_t>(out.id) + 1, 0.0);
    adj[out.id] = 1.0;
    for (std::int64_t i = out.id; i >= 0; --i) {
        const auto n = static_cast<std::size_t>(i);
        if (op_[n] == Op::DenseMarker) {
            const DenseRecord& rec = dense_[a_[n]];
            const std::size_t cols = rec.inputs.size();
            for (std::uint32_t r = 0; r < rec.rows; ++r) {
                const double g = adj[rec.out_first + r];
                if (g == 0.0) continue;
                adj[rec.b_first + r] += g;
                const std::uint32_t wrow = rec.w_first + r * static_cast<std::uint32_t>(cols);
                for (std::size_t c = 0; c < cols; ++c) {
                    adj[wrow + c] += g * val_[rec.inputs[c]];
                    adj[rec.inputs[c]] += g * val_[wrow + c];
                }
            }
            continue;
        }
        const double g = adj[n];
        if (g == 0.0) continue;
        if (a_[n] != kNone) adj[a_[n]] += g * da_[n];
        if (b_[n] != kNone) adj[b_[n]] += g * db_[n];
    }
    return adj;
}

std::vector<double> Tape::gradient(Var out, std::span<const Var> wrt) const {
    const std::vector<double> adj = adjoints(out);
    std::vector<double> g(wrt.size(), 0.0);
    for (std::size_t k = 0; k < wrt.size(); ++k) {
        if (wrt[k].id <= out.id) g[k] = adj[wrt[k].id];
    }
    return g;
}

std::vector<Var> Tape::gradient_recorded(Var out, std::span<const Var> wrt, std::size_t segment_begin) {
    const auto begin = static_cast<std::uint32_t>(segment_begin);
    if (begin > out.id) throw ShapeError("gradient_recorded: output precedes segment");

    // Targets are few (one variable block); a sorted list beats hashing here.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> targets;
    targets.reserve(wrt.size());
    for (const Var& w : wrt) {
        if (w.id >= begin) throw ShapeError("gradient_recorded: target inside the recorded segment");
        targets.emplace_back(w.id, kNone);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end(),
                              [](const auto& x, const auto& y) { return x.first == y.first; }),
                  targets.end());

    std::vector<std::uint32_t> adj(out.id - begin + 1, kNone);

    auto slot = [&](std::uint32_t p) -> std::uint32_t* {
        if (p == kNone) return nullptr;
        if (p >= begin) return &adj[p - begin];
        auto it = std::lower_bound(targets.begin(), targets.end(), std::make_pair(p, 0u));
        if (it != targets.end() && it->first == p) return &it->second;
        return nullptr;
    };
    auto acc = [&](std::uint32_t* s, Var v) {
        if (*s == kNone) {
            *s = v.id;
        } else {
            *s = (Var{this, *s} + v).id;
        }
    };

    adj[out.id - begin] = constant(1.0).id;

    for (std::int64_t i = out.id; i >= static_cast<std::int64_t>(begin); --i) {
        const auto n = static_cast<std::uint32_t>(i);
        const std::uint32_t an = adj[n - begin];
        const Op op = op_[n];
        if (op == Op::DenseMarker || op == Op::DenseOut) {
            if (an != kNone || op == Op::DenseMarker)
                throw UnsupportedOp("dense layer inside a recorded gradient segment");
        }
        if (an == kNone) continue;
        const Var A{this, an};
        const std::uint32_t pa = a_[n];
        const std::uint32_t pb = b_[n];
        std::uint32_t* sa = slot(pa);
        std::uint32_t* sb = nullptr;
        switch (op) {
            case Op::Leaf:
            case Op::Const:
                break;
            case Op::Add:
                if (sa) acc(sa, A);
                sb = slot(pb);
                if (sb) acc(sb, A);
                break;
            case Op::Sub:
                if (sa) acc(sa, A);
                sb = slot(pb);
                if (sb) acc(sb, -A);
                break;
            case Op::Mul:
                if (sa) acc(sa, A * Var{this, pb});
                sb = slot(pb);
                if (sb) acc(sb, A * Var{this, pa});
                break;
            case Op::Div: {
                const Var den{this, pb};
                if (sa) acc(sa, A / den);
                sb = slot(pb);
                if (sb) acc(sb, -((A * Var{this, n}) / den));
                break;
            }
            case Op::Affine:
            case Op::Piecewise:
                if (sa && da_[n] != 0.0) acc(sa, A * da_[n]);
                break;
            case Op::Exp:
                if (sa) acc(sa, A * Var{this, n});
                break;
            case Op::Log:
                if (sa) acc(sa, A / Var{this, pa});
                break;
            case Op::Sin:
                if (sa) acc(sa, A * cos(Var{this, pa}));
                break;
            case Op::Cos:
                if (sa) acc(sa, -(A * sin(Var{this, pa})));
                break;
            case Op::Sqrt:
                if (sa) acc(sa, (A / Var{this, n}) * 0.5);
                break;
            case Op::Square:
                if (sa) acc(sa, (A * Var{this, pa}) * 2.0);
                break;
            case Op::DenseOut:
            case Op::DenseMarker:
                break;
            default:
                throw UnsupportedOp("unregistered op id " + std::to_string(static_cast<int>(op)));
        }
    }

    std::vector<Var> result;
    result.reserve(wrt.size());
    for (const Var& w : wrt) {
        auto it = std::lower_bound(targets.begin(), targets.end(), std::make_pair(w.id, 0u));
        if (it->second == kNone) {
            result.push_back(constant(0.0));
        } else {
            result.push_back(Var{this, it->second});
        }
    }
    return result;
}

std::vector<Var> Tape::dense(std::span<const Var> x, std::uint32_t w_first, std::uint32_t b_first,
                             std::size_t rows) {
    const std::size_t cols = x.size();
    DenseRecord rec;
    rec.inputs.reserve(cols);
    for (const Var& v : x) rec.inputs.push_back(v.id);
    rec.w_first = w_first;
    rec.b_first = b_first;
    rec.rows = static_cast<std::uint32_t>(rows);
    rec.out_first = static_cast<std::uint32_t>(op_.size());

    std::vector<Var> y;
    y.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double s = val_[b_first + r];
        const std::size_t wrow = w_first + r * cols;
        for (std::size_t c = 0; c < cols; ++c) s += val_[wrow + c] * val_[rec.inputs[c]];
        y.push_back(push(Op::DenseOut, kNone, kNone, 0.0, 0.0, s));
    }
    dense_.push_back(std::move(rec));
    push(Op::DenseMarker, static_cast<std::uint32_t>(dense_.size() - 1), kNone, 0.0, 0.0, 0.0);
    return y;
}

// ---- arithmetic ---------------------------------------------------------

Var operator+(Var a, Var b) {
    return a.tape->push(Op::Add, a.id, b.id, 1.0, 1.0, a.value() + b.value());
}
Var operator-(Var a, Var b) {
    return a.tape->push(Op::Sub, a.id, b.id, 1.0, -1.0, a.value() - b.value());
}
Var operator*(Var a, Var b) {
    const double va = a.value();
    const double vb = b.value();
    return a.tape->push(Op::Mul, a.id, b.id, vb, va, va * vb);
}
Var operator/(Var a, Var b) {
    const double vb = b.value();
    const double v = a.value() / vb;
    return a.tape->push(Op::Div, a.id, b.id, 1.0 / vb, -v / vb, v);
}
Var operator-(Var a) { return a.tape->push(Op::Affine, a.id, Tape::kNone, -1.0, 0.0, -a.value()); }

Var operator+(Var a, double c) { return a.tape->push(Op::Affine, a.id, Tape::kNone, 1.0, 0.0, a.value() + c); }
Var operator+(double c, Var a) { return a + c; }
Var operator-(Var a, double c) { return a.tape->push(Op::Affine, a.id, Tape::kNone, 1.0, 0.0, a.value() - c); }
Var operator-(double c, Var a) { return a.tape->push(Op::Affine, a.id, Tape::kNone, -1.0, 0.0, c - a.value()); }
Var operator*(Var a, double c) { return a.tape->push(Op::Affine, a.id, Tape::kNone, c, 0.0, a.value() * c); }
Var operator*(double c, Var a) { return a * c; }
Var operator/(Var a, double c) { return a.tape->push(Op::Affine, a.id, Tape::kNone, 1.0 / c, 0.0, a.value() / c); }
Var operator/(double c, Var a) { return a.tape->constant(c) / a; }

Var exp(Var a) {
    const double v = std::exp(a.value());
    return a.tape->push(Op::Exp, a.id, Tape::kNone, v, 0.0, v);
}

Var log(Var a) {
    const double va = a.value();
    if (!(va > 0.0)) throw NumericFault("log", a.tape->size());
    return a.tape->push(Op::Log, a.id, Tape::kNone, 1.0 / va, 0.0, std::log(va));
}

Var log2(Var a) {
    const Var l = log(a);
    constexpr double inv_ln2 = 1.0 / std::numbers::ln2;
    return l.tape->push(Op::Affine, l.id, Tape::kNone, inv_ln2, 0.0, l.value() / std::numbers::ln2);
}

Var sin(Var a) {
    const double va = a.value();
    return a.tape->push(Op::Sin, a.id, Tape::kNone, std::cos(va), 0.0, std::sin(va));
}

Var cos(Var a) {
    const double va = a.value();
    return a.tape->push(Op::Cos, a.id, Tape::kNone, -std::sin(va), 0.0, std::cos(va));
}

Var sqrt(Var a) {
    const double va = a.value();
    if (!(va > 0.0)) throw NumericFault("sqrt", a.tape->size());
    const double v = std::sqrt(va);
    return a.tape->push(Op::Sqrt, a.id, Tape::kNone, 0.5 / v, 0.0, v);
}

Var square(Var a) {
    const double va = a.value();
    return a.tape->push(Op::Square, a.id, Tape::kNone, 2.0 * va, 0.0, va * va);
}

Var relu(Var a) {
    const double va = a.value();
    if (va > 0.0) return a;
    return a.tape->push(Op::Piecewise, a.id, Tape::kNone, 0.0, 0.0, 0.0);
}

Var leaky_relu(Var a, double slope) {
    const double va = a.value();
    if (va > 0.0) return a;
    return a.tape->push(Op::Piecewise, a.id, Tape::kNone, slope, 0.0, slope * va);
}

Var clamp(Var a, double lo, double hi) {
    const double va = a.value();
    if (va < lo) return a.tape->push(Op::Piecewise, a.id, Tape::kNone, 0.0, 0.0, lo);
    if (va > hi) return a.tape->push(Op::Piecewise, a.id, Tape::kNone, 0.0, 0.0, hi);
    return a;
}

}  // namespace fdisac::diff
