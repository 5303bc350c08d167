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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "fdisac/diff/blocks.hpp"
#include "fdisac/diff/complex.hpp"
#include "fdisac/diff/tape.hpp"
#include "fdisac/errors.hpp"

using namespace fdisac;
using diff::Tape;
using diff::Var;

TEST_CASE("elementary derivatives match closed forms") {
    Tape t;
    const double x0 = 0.7, y0 = -1.3;
    Var x = t.leaf(x0);
    Var y = t.leaf(y0);
    // f = exp(x) * sin(y) + log(x) / y + sqrt(x) * cos(y) - square(y)
    Var f = diff::exp(x) * diff::sin(y) + diff::log(x) / y + diff::sqrt(x) * diff::cos(y) - diff::square(y);
    const std::vector<Var> wrt{x, y};
    const auto g = t.gradient(f, wrt);
    const double dfx = std::exp(x0) * std::sin(y0) + 1.0 / (x0 * y0) + 0.5 / std::sqrt(x0) * std::cos(y0);
    const double dfy =
        std::exp(x0) * std::cos(y0) - std::log(x0) / (y0 * y0) - std::sqrt(x0) * std::sin(y0) - 2.0 * y0;
    CHECK(g[0] == doctest::Approx(dfx).epsilon(1e-14));
    CHECK(g[1] == doctest::Approx(dfy).epsilon(1e-14));
}

TEST_CASE("log2 agrees between plain and taped paths") {
    Tape t;
    for (double v : {1e-9, 0.3, 1.0, 7.5, 1e12}) {
        CHECK(diff::log2(t.leaf(v)).value() == fdisac::log2(v));
    }
    CHECK_THROWS_AS(fdisac::log2(0.0), NumericFault);
}

TEST_CASE("piecewise ops pick the right branch") {
    Tape t;
    Var a = t.leaf(-2.0);
    Var b = t.leaf(3.0);
    CHECK(diff::relu(a).value() == 0.0);
    CHECK(diff::relu(b).value() == 3.0);
    CHECK(diff::leaky_relu(a, 0.1).value() == doctest::Approx(-0.2));
    CHECK(diff::clamp(b, 0.0, 1.0).value() == 1.0);
    const std::vector<Var> wrt{a};
    CHECK(t.gradient(diff::leaky_relu(a, 0.1), wrt)[0] == doctest::Approx(0.1));
    CHECK(t.gradient(diff::clamp(a, -5.0, 5.0), wrt)[0] == 1.0);
    CHECK(t.gradient(diff::clamp(a, 0.0, 5.0), wrt)[0] == 0.0);
}

TEST_CASE("non-finite values raise NumericFault with the op name") {
    Tape t;
    Var z = t.leaf(0.0);
    try {
        (void)diff::log(z);
        FAIL("expected NumericFault");
    } catch (const NumericFault& e) {
        CHECK(e.op == "log");
    }
    CHECK_THROWS_AS((void)(t.leaf(1.0) / z), NumericFault);
}

TEST_CASE("complex gradient convention is dF/dRe + i dF/dIm") {
    // F = |z|^2 + Re(c* z); gradient 2z + c.
    const cdouble z0{0.4, -1.1};
    const cdouble c{2.0, 0.5};
    const diff::Program prog = [&](Tape&, std::span<const diff::BlockVars> b) {
        const Complex<Var> z = b[0].complex(0);
        return abs2(z) + real_part(conj_mul(Complex<double>{c.re, c.im}, z));
    };
    std::vector<diff::ParameterBlock> blocks{diff::ParameterBlock::complex("z", {1}, {z0})};
    const auto vg = diff::evaluate_with_gradient(prog, blocks);
    const cdouble g = vg.grads.complex_entry("z", 0);
    CHECK(g.re == doctest::Approx(2.0 * z0.re + c.re));
    CHECK(g.im == doctest::Approx(2.0 * z0.im + c.im));
}

TEST_CASE("recorded gradients can be differentiated again") {
    Tape t;
    const double x0 = 1.7;
    Var x = t.leaf(x0);
    Var w = t.leaf(0.3);
    const std::size_t seg = t.size();
    // Inner function f(x) = w x^3 + sin(x); record df/dx then differentiate it.
    Var xc = x;
    Var f = w * xc * xc * xc + diff::sin(xc);
    const std::vector<Var> wrt{x};
    const std::vector<Var> g = t.gradient_recorded(f, wrt, seg);
    CHECK(g[0].value() == doctest::Approx(3.0 * 0.3 * x0 * x0 + std::cos(x0)).epsilon(1e-14));
    const std::vector<Var> outer{x, w};
    const auto h = t.gradient(g[0], outer);
    CHECK(h[0] == doctest::Approx(6.0 * 0.3 * x0 - std::sin(x0)).epsilon(1e-13));
    CHECK(h[1] == doctest::Approx(3.0 * x0 * x0).epsilon(1e-13));
}

TEST_CASE("one gradient step through a recorded gradient") {
    // y = x + eta * d/dx(-(x - a)^2) = x - 2 eta (x - a); dy/deta = -2 (x - a).
    Tape t;
    const double x0 = 0.5, a = 2.0, eta0 = 0.1;
    Var x = t.leaf(x0);
    Var eta = t.leaf(eta0);
    const std::size_t seg = t.size();
    Var obj = -diff::square(x - a);
    const std::vector<Var> wrt{x};
    const Var g = t.gradient_recorded(obj, wrt, seg)[0];
    Var y = x + eta * g;
    const std::vector<Var> outer{eta, x};
    const auto d = t.gradient(y, outer);
    CHECK(d[0] == doctest::Approx(-2.0 * (x0 - a)));
    CHECK(d[1] == doctest::Approx(1.0 - 2.0 * eta0));
}

TEST_CASE("dense layer gradients match finite differences") {
    const std::vector<double> x0{0.3, -0.8, 1.1};
    const std::vector<double> w0{0.2, -0.1, 0.4, 0.9, 0.05, -0.7};
    const std::vector<double> b0{0.01, -0.02};
    auto run = [&](const std::vector<double>& xv, const std::vector<double>& wv, std::vector<double>* gx,
                   std::vector<double>* gw) {
        Tape t;
        std::vector<Var> x;
        for (double v : xv) x.push_back(t.leaf(v));
        std::vector<Var> w;
        for (double v : wv) w.push_back(t.leaf(v));
        std::vector<Var> b;
        for (double v : b0) b.push_back(t.leaf(v));
        const auto y = t.dense(x, w[0].id, b[0].id, 2);
        Var f = diff::sin(y[0]) + diff::square(y[1]);
        if (gx != nullptr) *gx = t.gradient(f, x);
        if (gw != nullptr) *gw = t.gradient(f, w);
        return f.value();
    };
    std::vector<double> gx, gw;
    run(x0, w0, &gx, &gw);
    const double h = 1e-6;
    for (std::size_t k = 0; k < x0.size(); ++k) {
        auto xp = x0, xm = x0;
        xp[k] += h;
        xm[k] -= h;
        CHECK(gx[k] == doctest::Approx((run(xp, w0, nullptr, nullptr) - run(xm, w0, nullptr, nullptr)) / (2 * h))
                           .epsilon(1e-8));
    }
    for (std::size_t k = 0; k < w0.size(); ++k) {
        auto wp = w0, wm = w0;
        wp[k] += h;
        wm[k] -= h;
        CHECK(gw[k] == doctest::Approx((run(x0, wp, nullptr, nullptr) - run(x0, wm, nullptr, nullptr)) / (2 * h))
                           .epsilon(1e-8));
    }
}

TEST_CASE("recording through a dense layer is rejected") {
    Tape t;
    Var x = t.leaf(1.0);
    Var w = t.leaf(2.0);
    Var b = t.leaf(0.0);
    const std::size_t seg = t.size();
    const std::vector<Var> in{x};
    const auto y = t.dense(in, w.id, b.id, 1);
    const std::vector<Var> wrt{x};
    CHECK_THROWS_AS(t.gradient_recorded(y[0] * y[0], wrt, seg), UnsupportedOp);
}

TEST_CASE("finite-difference helper agrees with the reverse sweep") {
    const diff::Program prog = [](Tape&, std::span<const diff::BlockVars> b) {
        Var acc = b[0].real(0) * b[0].real(1);
        for (std::size_t i = 0; i < b[1].count(); ++i) acc = acc + diff::log(1.0 + abs2(b[1].complex(i)));
        return acc;
    };
    std::vector<diff::ParameterBlock> blocks{
        diff::ParameterBlock::real("a", {2}, {0.5, -0.25}),
        diff::ParameterBlock::complex("z", {2}, {cdouble{0.3, 0.1}, cdouble{-1.0, 2.0}})};
    const auto vg = diff::evaluate_with_gradient(prog, blocks);
    const auto fd = diff::finite_difference_gradient(prog, blocks, 1e-6);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (std::size_t k = 0; k < blocks[b].values.size(); ++k) {
            CHECK(vg.grads.blocks[b].values[k] == doctest::Approx(fd.blocks[b].values[k]).epsilon(1e-8));
        }
    }
    CHECK_THROWS_AS(diff::ParameterBlock::real("bad", {3}, {1.0, 2.0}), ShapeError);
}
