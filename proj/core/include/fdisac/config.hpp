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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fdisac {

enum class SiModel {
    Quadratic,  // |Z^H H_SI^H sum_i p_i|^2
    Factored,   // ||Z||^2 * ||H_SI^H sum_i p_i||^2
};

enum class PenaltyMode {
    PaperIndicator,
    SoftHinge,
};

std::string to_string(SiModel m);
std::string to_string(PenaltyMode m);
PenaltyMode penalty_mode_from_string(const std::string& s);

/// Physical and problem constants of one scenario. Lengths in meters unless
/// noted; region_side and ds are in wavelengths.
struct ScenarioConfig {
    int n_t = 4;
    int n_rc = 4;
    int n_rs = 4;
    int d = 2;
    int u = 2;
    int c = 2;

    double lambda = 0.01;
    double region_side = 2.0;
    double ds = 0.5;
    int paths_tx = 4;
    int paths_rx = 4;

    double sigma2_d = 1e-12;
    double sigma2_u = 1e-12;
    double sigma2_s = 1e-12;
    double p_bs = 1.0;
    double p_u_max = 0.01;

    double r_th_d = 1.0;
    double r_th_u = 1.0;
    double lambda_th_s = 0.0;

    double g0_db = -40.0;
    double alpha = 2.5;
    double rho_si_db = -90.0;
    double rcs_target = 1e7;
    double rcs_clutter = 1e5;

    double user_radius_min = 20.0;
    double user_radius_max = 60.0;
    double target_radius_min = 10.0;
    double target_radius_max = 30.0;
    double clutter_radius_min = 10.0;
    double clutter_radius_max = 40.0;
    std::array<double, 2> bs_r_position{40.0, 0.0};

    double zeta_thd = 10.0;
    double zeta_thu = 10.0;
    double zeta_ths = 10.0;
    double zeta_2 = 10.0;
    double zeta_3 = 10.0;

    SiModel si_model = SiModel::Quadratic;

    int max_antennas() const;
    double g0() const;
    double rho_si() const;
    double region_extent() const { return region_side * lambda; }
    double min_spacing() const { return ds * lambda; }

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;
};

/// Meta-learning optimizer settings.
struct GmlConfig {
    int n_i = 10;
    int n_o = 5;
    int n_e = 500;
    double meta_lr = 1e-3;
    int hidden = 200;
    double step_scale = 5e-3;
    double leaky_slope = 0.01;
    PenaltyMode penalty_mode = PenaltyMode::SoftHinge;
    std::string init = "zero_output";  // zero_output | random
    std::uint64_t seed = 1;
    int truncation = 0;  // 0 = backpropagate through the full inner trajectory

    void validate() const;
};

/// Options of the multi-start penalized projected-gradient solver.
struct NlpOptions {
    int restarts = 20;
    int stages = 5;
    int steps_per_stage = 100;
    double penalty_initial = 1.0;
    double penalty_growth = 10.0;
    double step_size = 0.1;

    void validate() const;
};

struct SweepSpec {
    std::string parameter = "p_bs";  // p_bs | rho_si_db | thresholds
    std::vector<double> values{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> values_d;  // threshold grid, DL axis
    std::vector<double> values_u;  // threshold grid, UL axis
    std::vector<std::string> schemes{"ma", "ma_fd_only", "fpa_both"};
    int realizations = 150;
    std::uint64_t base_seed = 1;

    std::size_t point_count() const;
    void validate() const;
};

/// The full configuration document.
struct RunConfig {
    ScenarioConfig scenario;
    GmlConfig gml;
    NlpOptions nlp;
    SweepSpec sweep;
    std::uint64_t seed = 1;

    void validate() const;
};

void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, ScenarioConfig& c);
void to_json(nlohmann::json& j, const GmlConfig& c);
void from_json(const nlohmann::json& j, GmlConfig& c);
void to_json(nlohmann::json& j, const NlpOptions& c);
void from_json(const nlohmann::json& j, NlpOptions& c);
void to_json(nlohmann::json& j, const SweepSpec& c);
void from_json(const nlohmann::json& j, SweepSpec& c);
void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Parse a configuration document; missing keys take defaults, unknown keys
/// are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Stable 64-bit FNV-1a hash of the canonical JSON form.
std::uint64_t config_hash(const nlohmann::json& j);
std::string hex64(std::uint64_t v);

}  // namespace fdisac
