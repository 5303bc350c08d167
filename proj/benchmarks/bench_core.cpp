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

#include <benchmark/benchmark.h>

#include "fdisac/baselines.hpp"
#include "fdisac/gml.hpp"
#include "fdisac/metrics.hpp"

using namespace fdisac;

namespace {

const ScenarioConfig& desk() {
    static const ScenarioConfig cfg{};
    return cfg;
}

void BM_SamplePaths(benchmark::State& st) {
    std::uint64_t seed = 1;
    for (auto _ : st) benchmark::DoNotOptimize(sample_paths(desk(), seed++));
}
BENCHMARK(BM_SamplePaths);

void BM_RebuildChannels(benchmark::State& st) {
    const PathCollection paths = sample_paths(desk(), 1);
    const AntennaLayout layout = fpa_layout(desk());
    for (auto _ : st) benchmark::DoNotOptimize(rebuild_channels(desk(), layout, paths));
}
BENCHMARK(BM_RebuildChannels);

void BM_FullReport(benchmark::State& st) {
    const PathCollection paths = sample_paths(desk(), 1);
    const BeamformingState s = initial_state(desk(), 1);
    const ChannelSet ch = rebuild_channels(desk(), s.layout, paths);
    for (auto _ : st) benchmark::DoNotOptimize(full_report(desk(), ch, s));
}
BENCHMARK(BM_FullReport);

void BM_GmlEpoch(benchmark::State& st) {
    const PathCollection paths = sample_paths(desk(), 1);
    GmlConfig gml;
    GmlOptimizer opt(desk(), gml, paths);
    for (auto _ : st) benchmark::DoNotOptimize(opt.epoch());
}
BENCHMARK(BM_GmlEpoch)->Unit(benchmark::kMillisecond);

void BM_NlpSolve(benchmark::State& st) {
    const PathCollection paths = sample_paths(desk(), 1);
    NlpOptions nlp;
    nlp.restarts = 2;
    for (auto _ : st) benchmark::DoNotOptimize(solve_nlp(desk(), paths, nlp, 1));
}
BENCHMARK(BM_NlpSolve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
