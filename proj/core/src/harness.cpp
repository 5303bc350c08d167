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

#include "fdisac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "fdisac/errors.hpp"

namespace fdisac {

namespace {

constexpr double kMaxFailureShare = 0.2;
constexpr const char* kGridPrefix = "r_th_d@r_th_u=";

nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

double number_from_json(const nlohmann::json& j) {
    if (j.is_string()) return std::strtod(j.get<std::string>().c_str(), nullptr);
    return j.get<double>();
}

double parse_number(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ConfigError("bad number in " + what + ": '" + s + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

const std::string kRecordHeader = "scheme,sweep_param,sweep_value,realization,seed,lambda_t,feasible,runtime_s";

}  // namespace

std::vector<SweepPoint> sweep_points(const SweepSpec& spec, const ScenarioConfig& base) {
    spec.validate();
    std::vector<SweepPoint> pts;
    if (spec.parameter == "p_bs" || spec.parameter == "rho_si_db") {
        for (double v : spec.values) {
            SweepPoint p{spec.parameter, v, base};
            (spec.parameter == "p_bs" ? p.scenario.p_bs : p.scenario.rho_si_db) = v;
            pts.push_back(std::move(p));
        }
    } else if (spec.parameter == "thresholds") {
        for (double d : spec.values_d) {
            for (double u : spec.values_u) {
                SweepPoint p{kGridPrefix + format_double(u), d, base};
                p.scenario.r_th_d = d;
                p.scenario.r_th_u = u;
                pts.push_back(std::move(p));
            }
        }
    } else {
        throw ConfigError("unknown sweep parameter '" + spec.parameter + "'");
    }
    for (const SweepPoint& p : pts) p.scenario.validate();
    return pts;
}

bool parse_grid_label(const std::string& param, double& r_th_u) {
    const std::string prefix = kGridPrefix;
    if (param.rfind(prefix, 0) != 0) return false;
    r_th_u = parse_number(param.substr(prefix.size()), "grid label");
    return true;
}

Solution run_scheme(const std::string& scheme, const ScenarioConfig& cfg, const GmlConfig& gml,
                    const NlpOptions& nlp, const PathCollection& paths, std::uint64_t seed) {
    if (scheme == "ma") return run_gml(cfg, gml, paths, LayoutMask{}, "ma").solution;
    if (scheme == "ma_fd_only") {
        return run_gml(cfg, gml, paths, mask_for(BaselineKind::MaFdOnly), scheme).solution;
    }
    if (scheme == "fpa_both") return run_gml(cfg, gml, paths, mask_for(BaselineKind::FpaBoth), scheme).solution;
    if (scheme == "nlp") return solve_nlp(cfg, paths, nlp, seed);
    throw ConfigError("unknown scheme '" + scheme + "'");
}

std::vector<PointAggregate> aggregate(const std::vector<RunRecord>& records) {
    std::vector<PointAggregate> out;
    std::map<std::tuple<std::string, std::string, double>, std::size_t> index;
    std::vector<std::vector<double>> values;
    std::vector<double> runtime;
    for (const RunRecord& r : records) {
        const auto key = std::make_tuple(r.sweep_param, r.scheme, r.sweep_value);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            PointAggregate a;
            a.scheme = r.scheme;
            a.sweep_param = r.sweep_param;
            a.sweep_value = r.sweep_value;
            out.push_back(a);
            values.emplace_back();
            runtime.push_back(0.0);
        }
        PointAggregate& a = out[it->second];
        ++a.runs;
        if (r.failed) ++a.failures;
        if (r.feasible && !r.failed) {
            ++a.feasible_runs;
            values[it->second].push_back(r.lambda_t);
        }
        runtime[it->second] += r.runtime_s;
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        PointAggregate& a = out[k];
        const std::vector<double>& v = values[k];
        const double n = static_cast<double>(v.size());
        a.feasibility_rate = static_cast<double>(a.feasible_runs) / a.runs;
        a.mean_runtime_s = runtime[k] / a.runs;
        if (v.empty()) {
            a.mean_lambda_t = std::numeric_limits<double>::quiet_NaN();
            a.stderr_lambda_t = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double sum = 0.0;
        for (double x : v) sum += x;
        a.mean_lambda_t = sum / n;
        double ss = 0.0;
        for (double x : v) ss += (x - a.mean_lambda_t) * (x - a.mean_lambda_t);
        a.stderr_lambda_t = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    }
    return out;
}

ExperimentResult run_sweep(const SweepSpec& spec, const ScenarioConfig& scenario, const GmlConfig& gml,
                           const NlpOptions& nlp, const HarnessOptions& opt) {
    const std::vector<SweepPoint> pts = sweep_points(spec, scenario);
    gml.validate();
    nlp.validate();
    for (const std::string& s : spec.schemes) {
        if (s != "ma" && s != "ma_fd_only" && s != "fpa_both" && s != "nlp") {
            throw ConfigError("unknown scheme '" + s + "'");
        }
    }
    const std::size_t n_real = static_cast<std::size_t>(spec.realizations);
    const std::size_t n_sch = spec.schemes.size();
    const std::size_t n_jobs = pts.size() * n_real;
    std::vector<RunRecord> slots(n_jobs * n_sch);

    std::vector<std::size_t> remaining(pts.size(), n_real);
    std::size_t next_report = 0;
    std::mutex mu;
    std::atomic<std::size_t> next_job{0};

    auto report_ready = [&] {
        // caller holds mu
        while (next_report < pts.size() && remaining[next_report] == 0) {
            if (opt.on_point) {
                const auto first = slots.begin() + static_cast<std::ptrdiff_t>(next_report * n_real * n_sch);
                opt.on_point(aggregate({first, first + static_cast<std::ptrdiff_t>(n_real * n_sch)}));
            }
            ++next_report;
        }
    };

    auto worker = [&] {
        for (std::size_t job = next_job++; job < n_jobs; job = next_job++) {
            const std::size_t pi = job / n_real;
            const std::size_t r = job % n_real;
            const SweepPoint& pt = pts[pi];
            const std::uint64_t seed = spec.base_seed + r;
            const PathCollection paths = sample_paths(pt.scenario, seed);
            std::uint64_t shared_hash = 0;
            bool have_hash = false;
            for (std::size_t k = 0; k < n_sch; ++k) {
                RunRecord rec;
                rec.scheme = spec.schemes[k];
                rec.sweep_param = pt.param;
                rec.sweep_value = pt.value;
                rec.realization = static_cast<int>(r);
                rec.seed = seed;
                try {
                    const Solution sol = opt.runner ? opt.runner(rec.scheme, pt.scenario, paths, seed)
                                                    : run_scheme(rec.scheme, pt.scenario, gml, nlp, paths, seed);
                    rec.lambda_t = sol.objective;
                    rec.feasible = sol.feasible;
                    rec.runtime_s = opt.timing ? sol.seconds : 0.0;
                    rec.channel_hash = sol.channel_hash;
                    if (have_hash && shared_hash != sol.channel_hash) {
                        throw std::logic_error("paired schemes saw different channel realizations");
                    }
                    shared_hash = sol.channel_hash;
                    have_hash = true;
                } catch (const std::logic_error&) {
                    throw;
                } catch (const std::exception&) {
                    rec.failed = true;
                    rec.feasible = false;
                    rec.lambda_t = std::numeric_limits<double>::quiet_NaN();
                }
                slots[job * n_sch + k] = std::move(rec);
            }
            std::lock_guard<std::mutex> lock(mu);
            --remaining[pi];
            report_ready();
        }
    };

    const int workers = std::max(1, std::min<int>(opt.workers, static_cast<int>(std::max<std::size_t>(n_jobs, 1))));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex err_mu;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                try {
                    worker();
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    next_job = n_jobs;
                }
            });
        }
        for (std::thread& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    ExperimentResult res;
    res.records = std::move(slots);
    res.points = aggregate(res.records);
    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
        int failures = 0;
        for (std::size_t k = 0; k < n_real * n_sch; ++k) failures += res.records[pi * n_real * n_sch + k].failed;
        if (failures > kMaxFailureShare * static_cast<double>(n_real * n_sch)) {
            throw SweepError("sweep point " + pts[pi].param + "=" + format_double(pts[pi].value) + ": " +
                             std::to_string(failures) + " of " + std::to_string(n_real * n_sch) + " runs failed");
        }
    }
    return res;
}

ConvergenceResult run_convergence(const ScenarioConfig& scenario, const GmlConfig& gml, std::uint64_t seed) {
    GmlRun run = run_gml(scenario, gml, seed);
    return {std::move(run.solution), std::move(run.trace)};
}

ResultFormat result_format_from_string(const std::string& s) {
    if (s == "csv") return ResultFormat::Csv;
    if (s == "json") return ResultFormat::Json;
    throw ConfigError("unknown format '" + s + "' (csv | json)");
}

std::string records_csv(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    os << kRecordHeader << '\n';
    for (const RunRecord& r : records) {
        os << r.scheme << ',' << r.sweep_param << ',' << format_double(r.sweep_value) << ',' << r.realization << ','
           << r.seed << ',' << format_double(r.lambda_t) << ',' << (r.feasible ? 1 : 0) << ','
           << format_double(r.runtime_s) << '\n';
    }
    return os.str();
}

std::string aggregate_csv(const std::vector<PointAggregate>& points) {
    std::ostringstream os;
    os << "scheme,sweep_param,sweep_value,runs,feasible_runs,failures,mean_lambda_t,stderr_lambda_t,"
          "feasibility_rate,mean_runtime_s\n";
    for (const PointAggregate& a : points) {
        os << a.scheme << ',' << a.sweep_param << ',' << format_double(a.sweep_value) << ',' << a.runs << ','
           << a.feasible_runs << ',' << a.failures << ',' << format_double(a.mean_lambda_t) << ','
           << format_double(a.stderr_lambda_t) << ',' << format_double(a.feasibility_rate) << ','
           << format_double(a.mean_runtime_s) << '\n';
    }
    return os.str();
}

std::vector<RunRecord> parse_records_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kRecordHeader) throw ConfigError("records csv: bad header");
    std::vector<RunRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 8) throw ConfigError("records csv: expected 8 fields in '" + line + "'");
        RunRecord r;
        r.scheme = f[0];
        r.sweep_param = f[1];
        r.sweep_value = parse_number(f[2], "sweep_value");
        r.realization = std::stoi(f[3]);
        r.seed = std::stoull(f[4]);
        r.lambda_t = parse_number(f[5], "lambda_t");
        r.feasible = f[6] == "1";
        r.runtime_s = parse_number(f[7], "runtime_s");
        r.failed = std::isnan(r.lambda_t);
        out.push_back(std::move(r));
    }
    return out;
}

nlohmann::json result_json(const ExperimentResult& r) {
    nlohmann::json recs = nlohmann::json::array();
    for (const RunRecord& x : r.records) {
        recs.push_back({{"scheme", x.scheme},
                        {"sweep_param", x.sweep_param},
                        {"sweep_value", json_number(x.sweep_value)},
                        {"realization", x.realization},
                        {"seed", x.seed},
                        {"lambda_t", json_number(x.lambda_t)},
                        {"feasible", x.feasible},
                        {"runtime_s", json_number(x.runtime_s)}});
    }
    nlohmann::json agg = nlohmann::json::array();
    for (const PointAggregate& a : r.points) {
        agg.push_back({{"scheme", a.scheme},
                       {"sweep_param", a.sweep_param},
                       {"sweep_value", json_number(a.sweep_value)},
                       {"runs", a.runs},
                       {"feasible_runs", a.feasible_runs},
                       {"failures", a.failures},
                       {"mean_lambda_t", json_number(a.mean_lambda_t)},
                       {"stderr_lambda_t", json_number(a.stderr_lambda_t)},
                       {"feasibility_rate", json_number(a.feasibility_rate)},
                       {"mean_runtime_s", json_number(a.mean_runtime_s)}});
    }
    return {{"records", recs}, {"aggregate", agg}};
}

ExperimentResult parse_result_json(const nlohmann::json& j) {
    ExperimentResult out;
    for (const nlohmann::json& x : j.at("records")) {
        RunRecord r;
        r.scheme = x.at("scheme").get<std::string>();
        r.sweep_param = x.at("sweep_param").get<std::string>();
        r.sweep_value = number_from_json(x.at("sweep_value"));
        r.realization = x.at("realization").get<int>();
        r.seed = x.at("seed").get<std::uint64_t>();
        r.lambda_t = number_from_json(x.at("lambda_t"));
        r.feasible = x.at("feasible").get<bool>();
        r.runtime_s = number_from_json(x.at("runtime_s"));
        r.failed = std::isnan(r.lambda_t);
        out.records.push_back(std::move(r));
    }
    out.points = aggregate(out.records);
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(path, "cannot open for writing");
    f << text;
    f.close();
    if (!f) throw IoError(path, "write failed");
}

std::vector<std::string> emit_results(const ExperimentResult& result, ResultFormat format, const std::string& stem) {
    if (format == ResultFormat::Json) {
        const std::string path = stem + ".json";
        write_text_file(path, result_json(result).dump(2) + "\n");
        return {path};
    }
    const std::string raw = stem + ".csv";
    const std::string agg = stem + "_aggregate.csv";
    write_text_file(raw, records_csv(result.records));
    write_text_file(agg, aggregate_csv(result.points));
    return {raw, agg};
}

nlohmann::json run_manifest(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds) {
    nlohmann::json config;
    to_json(config, cfg);
    nlohmann::json positions = nlohmann::json::array();
    for (std::uint64_t s : seeds) {
        const Geometry g = sample_paths(cfg.scenario, s).geometry;
        auto xy = [](const Vec2& v) { return nlohmann::json::array({v.x, v.y}); };
        nlohmann::json dl = nlohmann::json::array(), ul = nlohmann::json::array(), cl = nlohmann::json::array();
        for (const Vec2& v : g.dl_users) dl.push_back(xy(v));
        for (const Vec2& v : g.ul_users) ul.push_back(xy(v));
        for (const Vec2& v : g.clutter) cl.push_back(xy(v));
        positions.push_back({{"seed", s},
                             {"dl_users", dl},
                             {"ul_users", ul},
                             {"target", xy(g.target)},
                             {"clutter", cl},
                             {"bs_r", xy(g.bs_r)}});
    }
    return {{"config", config},
            {"config_hash", hex64(config_hash(config))},
            {"seed", cfg.seed},
            {"seeds", seeds},
            {"positions", positions},
            {"versions",
             {{"fdisac", kVersion},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"cxx_standard", static_cast<long>(__cplusplus)}}}};
}

}  // namespace fdisac
