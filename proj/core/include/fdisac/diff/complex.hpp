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

// Complex arithmetic over a generic real scalar (double or diff::Var).
// The model code is written once against Complex<T> and instantiated for
// plain evaluation (T = double) and for taped evaluation (T = Var).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <type_traits>
#include <vector>

#include "fdisac/diff/tape.hpp"
#include "fdisac/errors.hpp"

namespace fdisac {

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

/// ln(x)/ln(2), matching the taped log2 bit for bit.
inline double log2(double x) {
    if (!(x > 0.0)) throw NumericFault("log2", 0);
    return std::log(x) / std::numbers::ln2;
}
inline double square(double x) { return x * x; }
inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline double leaky_relu(double x, double slope) { return x > 0.0 ? x : slope * x; }
inline double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }
inline double value_of(double x) { return x; }
inline double constant_like(double, double v) { return v; }

using diff::clamp;
using diff::constant_like;
using diff::leaky_relu;
using diff::log2;
using diff::relu;
using diff::square;
using diff::value_of;

template <class T>
struct Complex {
    T re;
    T im;

    Complex() = default;
    Complex(T r, T i) : re(r), im(i) {}
};

using cdouble = Complex<double>;

/// double when both are plain, diff::Var otherwise.
template <class A, class B>
using promote_t = std::conditional_t<std::is_same_v<A, double> && std::is_same_v<B, double>, double, diff::Var>;

inline cdouble to_cd(std::complex<double> z) { return {z.real(), z.imag()}; }
inline std::complex<double> to_std(const cdouble& z) { return {z.re, z.im}; }

template <class T>
Complex<double> value_of(const Complex<T>& z) {
    return {value_of(z.re), value_of(z.im)};
}

template <class A, class B>
auto operator+(const Complex<A>& a, const Complex<B>& b) {
    using R = decltype(a.re + b.re);
    return Complex<R>{a.re + b.re, a.im + b.im};
}

template <class A, class B>
auto operator-(const Complex<A>& a, const Complex<B>& b) {
    using R = decltype(a.re - b.re);
    return Complex<R>{a.re - b.re, a.im - b.im};
}

template <class A, class B>
auto operator*(const Complex<A>& a, const Complex<B>& b) {
    using R = decltype(a.re * b.re - a.im * b.im);
    return Complex<R>{a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

/// conj(a) * b, the building block of every Hermitian inner product.
template <class A, class B>
auto conj_mul(const Complex<A>& a, const Complex<B>& b) {
    using R = decltype(a.re * b.re + a.im * b.im);
    return Complex<R>{a.re * b.re + a.im * b.im, a.re * b.im - a.im * b.re};
}

template <class T>
Complex<T> operator-(const Complex<T>& a) {
    return {-a.re, -a.im};
}

template <class T>
Complex<T> conj(const Complex<T>& a) {
    return {a.re, -a.im};
}

/// Scale by a real factor (double or T).
template <class T, class S>
auto scale(const Complex<T>& a, const S& s) {
    using R = decltype(a.re * s);
    return Complex<R>{a.re * s, a.im * s};
}

template <class T>
T abs2(const Complex<T>& a) {
    return square(a.re) + square(a.im);
}

template <class T>
T real_part(const Complex<T>& a) {
    return a.re;
}

/// exp(i x) for real x.
template <class T>
Complex<T> exp_i(const T& x) {
    return {cos(x), sin(x)};
}

template <class T>
using CVector = std::vector<Complex<T>>;

/// Dense complex matrix, row-major.
template <class T>
struct CMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Complex<T>> data;

    CMatrix() = default;
    CMatrix(std::size_t r, std::size_t c, std::vector<Complex<T>> d) : rows(r), cols(c), data(std::move(d)) {}

    Complex<T>& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const Complex<T>& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

inline CMatrix<double> zeros(std::size_t r, std::size_t c) {
    return CMatrix<double>(r, c, std::vector<cdouble>(r * c, cdouble{0.0, 0.0}));
}

/// sum_k conj(a_k) b_k over two equally sized sequences (a^H b).
template <class A, class B>
auto inner(const std::vector<Complex<A>>& a, const std::vector<Complex<B>>& b) {
    auto acc = conj_mul(a[0], b[0]);
    for (std::size_t k = 1; k < a.size(); ++k) acc = acc + conj_mul(a[k], b[k]);
    return acc;
}

/// Squared Euclidean norm.
template <class T>
T norm2(const std::vector<Complex<T>>& a) {
    T acc = abs2(a[0]);
    for (std::size_t k = 1; k < a.size(); ++k) acc = acc + abs2(a[k]);
    return acc;
}

}  // namespace fdisac
