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

/// Monte Carlo sweeps over paired channel realizations, the convergence
/// trace driver, and result files.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdisac/baselines.hpp"
#include "fdisac/config.hpp"
#include "fdisac/gml.hpp"

namespace fdisac {

/// One scheme run on one realization at one sweep point.
struct RunRecord {
    std::string scheme;
    std::string sweep_param;
    double sweep_value = 0.0;
    int realization = 0;
    std::uint64_t seed = 0;
    double lambda_t = 0.0;
    bool feasible = false;
    double runtime_s = 0.0;
    bool failed = false;  // the run threw; lambda_t is NaN
    std::uint64_t channel_hash = 0;
};

/// Mean over feasible runs, standard error of that mean, share of feasible
/// runs and mean runtime over all runs.
struct PointAggregate {
    std::string scheme;
    std::string sweep_param;
    double sweep_value = 0.0;
    int runs = 0;
    int feasible_runs = 0;
    int failures = 0;
    double mean_lambda_t = 0.0;
    double stderr_lambda_t = 0.0;
    double feasibility_rate = 0.0;
    double mean_runtime_s = 0.0;
};

struct ExperimentResult {
    std::vector<RunRecord> records;      // ordered by point, realization, scheme
    std::vector<PointAggregate> points;  // ordered by point, scheme
};

/// One point of a sweep: the parameter label written to files, the value,
/// and the scenario it runs on.
struct SweepPoint {
    std::string param;
    double value = 0.0;
    ScenarioConfig scenario;
};

/// p_bs and rho_si_db sweep `values`; thresholds runs the values_d x
/// values_u grid (d-major). Grid points are labelled
/// "r_th_d@r_th_u=<u>" with the DL threshold as the value.
std::vector<SweepPoint> sweep_points(const SweepSpec& spec, const ScenarioConfig& base);

/// Splits a grid label back into the UL threshold; false for other labels.
bool parse_grid_label(const std::string& param, double& r_th_u);

struct HarnessOptions {
    int workers = 1;
    bool timing = true;  // false writes runtime_s = 0 for byte-stable output
    std::function<void(const std::vector<PointAggregate>&)> on_point;  // per completed point
    // Replaces run_scheme when set; used to inject faults.
    std::function<Solution(const std::string& scheme, const ScenarioConfig&, const PathCollection&, std::uint64_t seed)>
        runner;
};

/// Run one named scheme: ma, ma_fd_only, fpa_both or nlp.
Solution run_scheme(const std::string& scheme, const ScenarioConfig& cfg, const GmlConfig& gml,
                    const NlpOptions& nlp, const PathCollection& paths, std::uint64_t seed);

/// seed = base_seed + r for realization r; every scheme at that r sees the
/// same realization. Throws SweepError when more than 20% of the runs at a
/// point fail.
ExperimentResult run_sweep(const SweepSpec& spec, const ScenarioConfig& scenario, const GmlConfig& gml,
                           const NlpOptions& nlp = {}, const HarnessOptions& opt = {});

/// Recompute the aggregates from raw records (order of first appearance).
std::vector<PointAggregate> aggregate(const std::vector<RunRecord>& records);

struct ConvergenceResult {
    Solution solution;
    OptimizationTrace trace;
};

ConvergenceResult run_convergence(const ScenarioConfig& scenario, const GmlConfig& gml, std::uint64_t seed);

enum class ResultFormat { Csv, Json };
ResultFormat result_format_from_string(const std::string& s);

std::string records_csv(const std::vector<RunRecord>& records);
std::string aggregate_csv(const std::vector<PointAggregate>& points);
nlohmann::json result_json(const ExperimentResult& r);

std::vector<RunRecord> parse_records_csv(const std::string& text);
ExperimentResult parse_result_json(const nlohmann::json& j);

/// Writes <stem>.csv and <stem>_aggregate.csv, or <stem>.json. Returns the
/// paths written. Throws IoError naming the path.
std::vector<std::string> emit_results(const ExperimentResult& result, ResultFormat format, const std::string& stem);

/// Write `text` to `path`, throwing IoError on failure.
void write_text_file(const std::string& path, const std::string& text);

/// Config hash, seeds, per-seed sampled positions and versions.
nlohmann::json run_manifest(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fdisac
