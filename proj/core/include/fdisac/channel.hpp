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

/// Field-response channel model.
///
/// Every link is h = F^H Sigma G, where G (L_T x N_t) stacks the transmit
/// field-response vectors of the transmit antennas, F (L_R x N_r) the receive
/// ones, and Sigma (L_R x L_T) is the path-response matrix. Only the phases
/// of F and G depend on antenna positions; angles and Sigma are frozen per
/// channel realization. Users are single-antenna with the antenna at their
/// local origin, so their field-response vectors are all-ones.
///
/// Channels are templated on the scalar so the same code builds plain
/// channels (double) and taped channels (diff::Var) for position gradients.

#include <cstdint>
#include <vector>

#include "fdisac/config.hpp"
#include "fdisac/diff/complex.hpp"

namespace fdisac {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

template <class T>
struct Point {
    T x;
    T y;
};

/// Positions of all movable antennas, each within its own square region
/// [0, region_side * lambda]^2 (meters, local coordinates).
template <class T>
struct AntennaLayoutT {
    std::vector<Point<T>> t_bs;    // N_T transmit antennas, FD BS
    std::vector<Point<T>> r_bs_c;  // N_Rc receive antennas, FD BS
    std::vector<Point<T>> r_bs_s;  // N_Rs receive antennas, BS R
    bool feasible = false;         // spacing and region rules verified
};
using AntennaLayout = AntennaLayoutT<double>;

enum class AntennaGroup { Transmit = 0, ReceiveComm = 1, ReceiveSense = 2 };

template <class T>
std::vector<Point<T>>& group(AntennaLayoutT<T>& l, AntennaGroup g) {
    return g == AntennaGroup::Transmit ? l.t_bs : (g == AntennaGroup::ReceiveComm ? l.r_bs_c : l.r_bs_s);
}
template <class T>
const std::vector<Point<T>>& group(const AntennaLayoutT<T>& l, AntennaGroup g) {
    return g == AntennaGroup::Transmit ? l.t_bs : (g == AntennaGroup::ReceiveComm ? l.r_bs_c : l.r_bs_s);
}

/// Elevation theta and azimuth phi, radians.
struct Angle {
    double theta = 0.0;
    double phi = 0.0;
};

/// Geometry and path responses of one link.
struct PathSet {
    std::vector<Angle> tx;  // L_T departure angles
    std::vector<Angle> rx;  // L_R arrival angles
    CMatrix<double> prm;    // L_R x L_T
    double distance = 0.0;  // meters (0 for the self-interference link)

    void validate() const;
};

/// User, target and clutter positions for one realization. The FD BS sits at
/// the origin.
struct Geometry {
    std::vector<Vec2> dl_users;
    std::vector<Vec2> ul_users;
    Vec2 target;
    std::vector<Vec2> clutter;
    Vec2 bs_r;
};

/// All frozen randomness of one channel realization.
struct PathCollection {
    std::uint64_t seed = 0;
    Geometry geometry;
    std::vector<PathSet> dl;               // FD BS -> DL user i
    std::vector<PathSet> ul;               // UL user j -> FD BS
    std::vector<std::vector<PathSet>> ui;  // [j][i] UL user j -> DL user i
    PathSet si;                            // FD BS transmit -> FD BS receive
    std::vector<PathSet> ur;               // UL user j -> BS R
    Angle target_tx;                       // FD BS -> target
    Angle target_rx;                       // target -> BS R
    std::vector<Angle> clutter_tx;
    std::vector<Angle> clutter_rx;
    cdouble beta_bt{0.0, 0.0};
    cdouble beta_srt{0.0, 0.0};
    std::vector<cdouble> beta_bc;
    std::vector<cdouble> beta_src;
};

/// Assembled channels. Row responses (h_d) are such that the received
/// amplitude at DL user i is sum_n h_d[i][n] p[n], i.e. h_d[i] is the row
/// f^H Sigma G and plays the role of h^H in column notation.
template <class T>
struct ChannelSetT {
    std::vector<CVector<T>> h_d;   // D x N_T
    std::vector<CVector<T>> h_u;   // U x N_Rc
    CMatrix<double> h_ji;          // U x D, position independent
    CMatrix<T> h_si;               // N_T x N_Rc
    std::vector<CVector<T>> h_jr;  // U x N_Rs
    CVector<T> g_bt;               // N_T
    CVector<T> g_srt;              // N_Rs
    std::vector<CVector<T>> g_bc;  // C x N_T
    std::vector<CVector<T>> g_src; // C x N_Rs
};
using ChannelSet = ChannelSetT<double>;

template <class T>
struct SensingChannels {
    CVector<T> g_bt;
    CVector<T> g_srt;
    std::vector<CVector<T>> g_bc;
    std::vector<CVector<T>> g_src;
};

/// x cos(theta) sin(phi) + y sin(theta).
template <class T>
T propagation_difference(const Point<T>& position, double theta, double phi);

/// Field-response vector: entry m = exp(sign * j * 2pi/lambda * rho_m).
/// Transmit side and most receive sides use sign = -1; the self-interference
/// link uses +1 on both ends.
template <class T>
CVector<T> frv(const Point<T>& position, const std::vector<Angle>& angles, double lambda, double sign = -1.0);

/// Stack field-response vectors of several antennas into an L x N matrix.
template <class T>
CMatrix<T> frm(const std::vector<Point<T>>& positions, const std::vector<Angle>& angles, double lambda,
               double sign = -1.0);

/// F^H Sigma G. Shapes: F is L_R x N_r, Sigma L_R x L_T, G L_T x N_t; the
/// result is N_r x N_t. Either factor may be plain or taped.
template <class A, class B>
CMatrix<promote_t<A, B>> assemble_link_channel(const CMatrix<A>& receive_frm, const CMatrix<double>& prm,
                                               const CMatrix<B>& transmit_frm);

template <class T>
SensingChannels<T> build_sensing_channels(const ScenarioConfig& config, const AntennaLayoutT<T>& layout,
                                          const PathCollection& paths);

template <class T>
ChannelSetT<T> rebuild_channels(const ScenarioConfig& config, const AntennaLayoutT<T>& layout,
                                const PathCollection& paths);

/// Draw user/target/clutter positions, angles, path responses and fading
/// coefficients. Deterministic in (config counts, seed). Power-scaling
/// quantities (g0, alpha, rho_si) only rescale unit-variance draws, so
/// changing them keeps the underlying realization paired.
PathCollection sample_paths(const ScenarioConfig& config, std::uint64_t seed);

/// Centered square grid with spacing ds * lambda in every group (the
/// fixed-position reference layout).
AntennaLayout fpa_layout(const ScenarioConfig& config);

/// 64-bit hash of the bit patterns of every channel entry.
std::uint64_t channel_hash(const ChannelSet& ch);

template <class T>
AntennaLayout layout_value(const AntennaLayoutT<T>& l);

}  // namespace fdisac
