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

#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fdisac/errors.hpp"
#include "fdisac/harness.hpp"

namespace fdisac::cli {

namespace {

struct Options {
    std::string config;
    std::string out = "fdisac_out";
    std::uint64_t seed = 0;
    std::string scheme;
    std::string penalty;
    int realizations = 0;
    std::string format = "csv";
    int workers = 0;
    bool no_timing = false;
};

nlohmann::json num(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

nlohmann::json cmatrix_json(const CMatrix<double>& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.cols; ++c) row.push_back({m(r, c).re, m(r, c).im});
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json points_json(const std::vector<Point<double>>& pts) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : pts) a.push_back({p.x, p.y});
    return a;
}

nlohmann::json solution_json(const Solution& s, bool timing) {
    nlohmann::json v = nlohmann::json::array();
    for (const cdouble& x : s.state.v) v.push_back({x.re, x.im});
    return {{"scheme", s.scheme},
            {"lambda_t", num(s.objective)},
            {"feasible", s.feasible},
            {"violated", s.check.violated},
            {"paper_loss", num(s.paper_loss.total)},
            {"channel_hash", hex64(s.channel_hash)},
            {"runtime_s", timing ? s.seconds : 0.0},
            {"report", report_record(s.report)},
            {"state",
             {{"p", cmatrix_json(s.state.p)},
              {"p_u", s.state.p_u},
              {"z", cmatrix_json(s.state.z)},
              {"v", v},
              {"layout",
               {{"t_bs", points_json(s.state.layout.t_bs)},
                {"r_bs_c", points_json(s.state.layout.r_bs_c)},
                {"r_bs_s", points_json(s.state.layout.r_bs_s)}}}}}};
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::uint64_t> sweep_seeds(const SweepSpec& s) {
    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < s.realizations; ++r) seeds.push_back(s.base_seed + static_cast<std::uint64_t>(r));
    return seeds;
}

class Session {
  public:
    Session(const Options& o, bool seed_given, std::ostream& out) : o_(o), out_(out) {
        cfg_ = o.config.empty() ? RunConfig{} : load_config(o.config);
        if (seed_given) {
            apply_seed(o.seed);
        } else if (const char* env = std::getenv("SEED_OVERRIDE"); env != nullptr && *env != '\0') {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (*end != '\0') throw ConfigError("SEED_OVERRIDE is not an unsigned integer: '" + std::string(env) + "'");
            apply_seed(v);
        }
        if (!o.penalty.empty()) cfg_.gml.penalty_mode = penalty_mode_from_string(o.penalty);
        if (o.realizations > 0) cfg_.sweep.realizations = o.realizations;
        if (!o.scheme.empty()) cfg_.sweep.schemes = split_list(o.scheme);
        cfg_.validate();
        format_ = result_format_from_string(o.format);
    }

    const RunConfig& config() const { return cfg_; }

    int run_one() {
        const std::string scheme = o_.scheme.empty() ? "ma" : o_.scheme;
        prepare_out();
        const PathCollection paths = sample_paths(cfg_.scenario, cfg_.seed);
        const Solution sol = run_scheme(scheme, cfg_.scenario, cfg_.gml, cfg_.nlp, paths, cfg_.seed);
        write("solution.json", solution_json(sol, timing()).dump(2) + "\n");
        write_manifest({cfg_.seed});
        out_ << "run scheme=" << scheme << " seed=" << cfg_.seed << " lambda_t=" << format_double(sol.objective)
             << " feasible=" << sol.feasible << "\n";
        return sol.feasible ? kOk : kInfeasible;
    }

    int converge() {
        prepare_out();
        ConvergenceResult r = run_convergence(cfg_.scenario, cfg_.gml, cfg_.seed);
        if (!timing()) {
            for (TraceRow& row : r.trace.rows) row.seconds = 0.0;
            r.solution.seconds = 0.0;
        }
        if (format_ == ResultFormat::Csv) {
            write("trace.csv", trace_csv(r.trace));
        } else {
            nlohmann::json rows = nlohmann::json::array();
            for (const TraceRow& row : r.trace.rows) {
                rows.push_back({{"epoch", row.epoch},
                                {"mean_meta_loss", num(row.mean_meta_loss)},
                                {"best_objective", num(row.best_objective)},
                                {"feasible_flag", row.feasible},
                                {"seconds", row.seconds}});
            }
            write("trace.json", rows.dump(2) + "\n");
        }
        write("solution.json", solution_json(r.solution, timing()).dump(2) + "\n");
        write_manifest({cfg_.seed});
        const double best = r.trace.rows.empty() ? r.solution.objective : r.trace.rows.back().best_objective;
        out_ << "converge seed=" << cfg_.seed << " epochs=" << r.trace.rows.size()
             << " best_objective=" << format_double(best) << " feasible=" << r.solution.feasible << "\n";
        return kOk;
    }

    int sweep() {
        prepare_out();
        const ExperimentResult res = run_sweep(cfg_.sweep, cfg_.scenario, cfg_.gml, cfg_.nlp, harness_options());
        emit_results(res, format_, path("sweep"));
        write_manifest(sweep_seeds(cfg_.sweep));
        return kOk;
    }

    int compare() {
        prepare_out();
        SweepSpec spec = cfg_.sweep;
        spec.parameter = "p_bs";
        spec.values = {cfg_.scenario.p_bs};
        if (o_.scheme.empty()) spec.schemes = {"ma", "nlp"};
        if (spec.schemes.size() != 2) throw ConfigError("compare needs exactly two schemes");
        const ExperimentResult res = run_sweep(spec, cfg_.scenario, cfg_.gml, cfg_.nlp, harness_options());
        emit_results(res, format_, path("compare"));

        int pairs = 0;
        double ratio_sum = 0.0;
        for (std::size_t k = 0; k + 1 < res.records.size(); k += 2) {
            const RunRecord& a = res.records[k];
            const RunRecord& b = res.records[k + 1];
            if (a.feasible && b.feasible) {
                ++pairs;
                ratio_sum += a.lambda_t / b.lambda_t;
            }
        }
        const double mean_ratio = pairs > 0 ? ratio_sum / pairs : std::numeric_limits<double>::quiet_NaN();
        const nlohmann::json summary{{"numerator", spec.schemes[0]},
                                     {"denominator", spec.schemes[1]},
                                     {"realizations", spec.realizations},
                                     {"feasible_pairs", pairs},
                                     {"mean_ratio", num(mean_ratio)}};
        write("compare_summary.json", summary.dump(2) + "\n");
        write_manifest(sweep_seeds(spec));
        out_ << "compare " << spec.schemes[0] << "/" << spec.schemes[1] << " pairs=" << pairs << "/"
             << spec.realizations << " mean_ratio=" << format_double(mean_ratio) << "\n";
        return kOk;
    }

  private:
    void apply_seed(std::uint64_t s) {
        cfg_.seed = s;
        cfg_.sweep.base_seed = s;
    }

    bool timing() const { return !o_.no_timing; }

    HarnessOptions harness_options() {
        HarnessOptions h;
        h.workers = o_.workers > 0 ? o_.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        h.timing = timing();
        h.on_point = [this](const std::vector<PointAggregate>& pts) {
            for (const PointAggregate& a : pts) {
                out_ << "point " << a.sweep_param << "=" << format_double(a.sweep_value) << " scheme=" << a.scheme
                     << " mean_lambda_t=" << format_double(a.mean_lambda_t)
                     << " stderr=" << format_double(a.stderr_lambda_t)
                     << " feasible=" << a.feasible_runs << "/" << a.runs << "\n";
            }
            out_.flush();
        };
        return h;
    }

    void prepare_out() {
        std::error_code ec;
        std::filesystem::create_directories(o_.out, ec);
        if (ec) throw IoError(o_.out, ec.message());
    }

    std::string path(const std::string& name) const { return (std::filesystem::path(o_.out) / name).string(); }

    void write(const std::string& name, const std::string& text) const { write_text_file(path(name), text); }

    void write_manifest(const std::vector<std::uint64_t>& seeds) const {
        write("manifest.json", run_manifest(cfg_, seeds).dump(2) + "\n");
    }

    Options o_;
    std::ostream& out_;
    RunConfig cfg_;
    ResultFormat format_ = ResultFormat::Csv;
};

void add_common(CLI::App* sub, Options& o, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "configuration document (JSON)");
    if (config_required) c->required();
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "seed override (also SEED_OVERRIDE)");
    sub->add_option("--scheme", o.scheme, "ma | ma_fd_only | fpa_both | nlp (comma list for sweeps)");
    sub->add_option("--penalty-mode", o.penalty, "soft-hinge | paper-indicator");
    sub->add_option("--realizations", o.realizations, "realizations per sweep point")->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", o.workers, "worker threads (default: available cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--no-timing", o.no_timing, "write runtime_s = 0 so repeated runs are byte-identical");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"fdisac: full-duplex ISAC with movable antennas"};
    app.require_subcommand(1);
    Options o;
    CLI::App* run_cmd = app.add_subcommand("run", "optimize one realization with one scheme");
    CLI::App* conv_cmd = app.add_subcommand("converge", "meta-learning run with per-epoch trace");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over paired realizations");
    CLI::App* cmp_cmd = app.add_subcommand("compare", "paired ratio of two schemes");
    CLI::App* val_cmd = app.add_subcommand("validate", "check a config and print the effective document");
    for (CLI::App* s : {run_cmd, conv_cmd, sweep_cmd, cmp_cmd}) add_common(s, o, true);
    add_common(val_cmd, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        Session s(o, app.get_subcommands().front()->count("--seed") > 0, out);
        if (*val_cmd) {
            nlohmann::json j;
            to_json(j, s.config());
            out << j.dump(2) << "\n";
            return kOk;
        }
        if (*run_cmd) return s.run_one();
        if (*conv_cmd) return s.converge();
        if (*sweep_cmd) return s.sweep();
        return s.compare();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return kUsage;
    } catch (const InfeasibleLayout& e) {
        err << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const SweepError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const NumericFault& e) {
        err << e.what() << "\n";
        return kNumericFault;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace fdisac::cli
