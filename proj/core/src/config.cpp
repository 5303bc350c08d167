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

#include "fdisac/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fdisac/errors.hpp"

namespace fdisac {

using nlohmann::json;

std::string to_string(SiModel m) { return m == SiModel::Quadratic ? "quadratic" : "factored"; }

std::string to_string(PenaltyMode m) { return m == PenaltyMode::SoftHinge ? "soft" : "paper"; }

PenaltyMode penalty_mode_from_string(const std::string& s) {
    if (s == "soft" || s == "soft-hinge") return PenaltyMode::SoftHinge;
    if (s == "paper" || s == "paper-indicator") return PenaltyMode::PaperIndicator;
    throw ConfigError("unknown penalty mode '" + s + "' (expected soft|paper)");
}

namespace {

SiModel si_model_from_string(const std::string& s) {
    if (s == "quadratic") return SiModel::Quadratic;
    if (s == "factored") return SiModel::Factored;
    throw ConfigError("unknown si_model '" + s + "' (expected quadratic|factored)");
}

/// Reads keys from one section, remembering which ones were consumed so the
/// leftovers can be reported as typos.
class Reader {
  public:
    Reader(const json& j, std::string section) : j_(j), section_(std::move(section)) {
        if (!j_.is_object()) throw ConfigError("section '" + section_ + "' must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(section_ + "." + key + ": " + e.what());
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError("unknown key '" + section_ + "." + it.key() + "'");
        }
    }

  private:
    const json& j_;
    std::string section_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

int ScenarioConfig::max_antennas() const { return std::max({n_t, n_rc, n_rs}); }

double ScenarioConfig::g0() const { return std::pow(10.0, g0_db / 10.0); }

double ScenarioConfig::rho_si() const { return std::pow(10.0, rho_si_db / 10.0); }

void ScenarioConfig::validate() const {
    require(n_t >= 1 && n_rc >= 1 && n_rs >= 1, "antenna counts must be >= 1");
    require(d >= 1 && u >= 1, "user counts d, u must be >= 1");
    require(c >= 0, "clutter count c must be >= 0");
    require(paths_tx >= 1 && paths_rx >= 1, "path counts must be >= 1");
    require(lambda > 0.0, "lambda must be > 0");
    require(ds > 0.0, "ds must be > 0");
    const double needed = ds * (std::ceil(std::sqrt(static_cast<double>(max_antennas()))) - 1.0);
    require(region_side >= needed, "region_side too small to host the largest antenna group at spacing ds");
    require(sigma2_d > 0.0 && sigma2_u > 0.0 && sigma2_s > 0.0, "noise powers must be > 0");
    require(p_bs > 0.0 && p_u_max > 0.0, "power budgets must be > 0");
    require(rcs_target > 0.0 && rcs_clutter >= 0.0, "rcs gains must be positive");
    require(alpha > 0.0, "pathloss exponent must be > 0");
    require(user_radius_min > 0.0 && user_radius_max >= user_radius_min, "bad user annulus");
    require(target_radius_min > 0.0 && target_radius_max >= target_radius_min, "bad target annulus");
    require(clutter_radius_min > 0.0 && clutter_radius_max >= clutter_radius_min, "bad clutter annulus");
    require(zeta_thd >= 0.0 && zeta_thu >= 0.0 && zeta_ths >= 0.0 && zeta_2 >= 0.0 && zeta_3 >= 0.0,
            "regularizers must be >= 0");
}

void GmlConfig::validate() const {
    require(n_i >= 1 && n_o >= 1 && n_e >= 1, "gml iteration counts must be >= 1");
    require(meta_lr > 0.0, "meta_lr must be > 0");
    require(hidden >= 1, "hidden width must be >= 1");
    require(step_scale > 0.0, "step_scale must be > 0");
    require(init == "zero_output" || init == "random", "init must be zero_output|random");
    require(truncation >= 0, "truncation must be >= 0");
}

void NlpOptions::validate() const {
    require(restarts >= 1, "restarts must be >= 1");
    require(stages >= 1 && steps_per_stage >= 1, "stages and steps_per_stage must be >= 1");
    require(penalty_initial > 0.0 && penalty_growth >= 1.0, "bad penalty schedule");
    require(step_size > 0.0, "step_size must be > 0");
}

std::size_t SweepSpec::point_count() const {
    if (parameter == "thresholds") return values_d.size() * values_u.size();
    return values.size();
}

void SweepSpec::validate() const {
    require(parameter == "p_bs" || parameter == "rho_si_db" || parameter == "thresholds",
            "sweep parameter must be p_bs|rho_si_db|thresholds");
    require(point_count() >= 1, "sweep value list must be nonempty");
    require(realizations >= 1, "realizations must be >= 1");
    require(!schemes.empty(), "sweep needs at least one scheme");
    for (const auto& s : schemes) {
        require(s == "ma" || s == "ma_fd_only" || s == "fpa_both" || s == "nlp", "unknown scheme '" + s + "'");
    }
}

void RunConfig::validate() const {
    scenario.validate();
    gml.validate();
    nlp.validate();
    sweep.validate();
}

// ---- JSON ---------------------------------------------------------------

void to_json(json& j, const ScenarioConfig& c) {
    j = json{{"n_t", c.n_t},
             {"n_rc", c.n_rc},
             {"n_rs", c.n_rs},
             {"d", c.d},
             {"u", c.u},
             {"c", c.c},
             {"lambda", c.lambda},
             {"region_side", c.region_side},
             {"ds", c.ds},
             {"paths_tx", c.paths_tx},
             {"paths_rx", c.paths_rx},
             {"sigma2_d", c.sigma2_d},
             {"sigma2_u", c.sigma2_u},
             {"sigma2_s", c.sigma2_s},
             {"p_bs", c.p_bs},
             {"p_u_max", c.p_u_max},
             {"r_th_d", c.r_th_d},
             {"r_th_u", c.r_th_u},
             {"lambda_th_s", c.lambda_th_s},
             {"g0_db", c.g0_db},
             {"alpha", c.alpha},
             {"rho_si_db", c.rho_si_db},
             {"rcs_target", c.rcs_target},
             {"rcs_clutter", c.rcs_clutter},
             {"user_radius_min", c.user_radius_min},
             {"user_radius_max", c.user_radius_max},
             {"target_radius_min", c.target_radius_min},
             {"target_radius_max", c.target_radius_max},
             {"clutter_radius_min", c.clutter_radius_min},
             {"clutter_radius_max", c.clutter_radius_max},
             {"bs_r_position", c.bs_r_position},
             {"zeta_thd", c.zeta_thd},
             {"zeta_thu", c.zeta_thu},
             {"zeta_ths", c.zeta_ths},
             {"zeta_2", c.zeta_2},
             {"zeta_3", c.zeta_3},
             {"si_model", to_string(c.si_model)}};
}

void from_json(const json& j, ScenarioConfig& c) {
    Reader r(j, "scenario");
    r.get("n_t", c.n_t);
    r.get("n_rc", c.n_rc);
    r.get("n_rs", c.n_rs);
    r.get("d", c.d);
    r.get("u", c.u);
    r.get("c", c.c);
    r.get("lambda", c.lambda);
    r.get("region_side", c.region_side);
    r.get("ds", c.ds);
    r.get("paths_tx", c.paths_tx);
    r.get("paths_rx", c.paths_rx);
    r.get("sigma2_d", c.sigma2_d);
    r.get("sigma2_u", c.sigma2_u);
    r.get("sigma2_s", c.sigma2_s);
    r.get("p_bs", c.p_bs);
    r.get("p_u_max", c.p_u_max);
    r.get("r_th_d", c.r_th_d);
    r.get("r_th_u", c.r_th_u);
    r.get("lambda_th_s", c.lambda_th_s);
    r.get("g0_db", c.g0_db);
    r.get("alpha", c.alpha);
    r.get("rho_si_db", c.rho_si_db);
    r.get("rcs_target", c.rcs_target);
    r.get("rcs_clutter", c.rcs_clutter);
    r.get("user_radius_min", c.user_radius_min);
    r.get("user_radius_max", c.user_radius_max);
    r.get("target_radius_min", c.target_radius_min);
    r.get("target_radius_max", c.target_radius_max);
    r.get("clutter_radius_min", c.clutter_radius_min);
    r.get("clutter_radius_max", c.clutter_radius_max);
    r.get("bs_r_position", c.bs_r_position);
    r.get("zeta_thd", c.zeta_thd);
    r.get("zeta_thu", c.zeta_thu);
    r.get("zeta_ths", c.zeta_ths);
    r.get("zeta_2", c.zeta_2);
    r.get("zeta_3", c.zeta_3);
    std::string si = to_string(c.si_model);
    r.get("si_model", si);
    c.si_model = si_model_from_string(si);
    r.finish();
}

void to_json(json& j, const GmlConfig& c) {
    j = json{{"n_i", c.n_i},
             {"n_o", c.n_o},
             {"n_e", c.n_e},
             {"meta_lr", c.meta_lr},
             {"hidden", c.hidden},
             {"step_scale", c.step_scale},
             {"leaky_slope", c.leaky_slope},
             {"penalty_mode", to_string(c.penalty_mode)},
             {"init", c.init},
             {"seed", c.seed},
             {"truncation", c.truncation}};
}

void from_json(const json& j, GmlConfig& c) {
    Reader r(j, "gml");
    r.get("n_i", c.n_i);
    r.get("n_o", c.n_o);
    r.get("n_e", c.n_e);
    r.get("meta_lr", c.meta_lr);
    r.get("hidden", c.hidden);
    r.get("step_scale", c.step_scale);
    r.get("leaky_slope", c.leaky_slope);
    std::string mode = to_string(c.penalty_mode);
    r.get("penalty_mode", mode);
    c.penalty_mode = penalty_mode_from_string(mode);
    r.get("init", c.init);
    r.get("seed", c.seed);
    r.get("truncation", c.truncation);
    r.finish();
}

void to_json(json& j, const NlpOptions& c) {
    j = json{{"restarts", c.restarts},
             {"stages", c.stages},
             {"steps_per_stage", c.steps_per_stage},
             {"penalty_initial", c.penalty_initial},
             {"penalty_growth", c.penalty_growth},
             {"step_size", c.step_size}};
}

void from_json(const json& j, NlpOptions& c) {
    Reader r(j, "nlp");
    r.get("restarts", c.restarts);
    r.get("stages", c.stages);
    r.get("steps_per_stage", c.steps_per_stage);
    r.get("penalty_initial", c.penalty_initial);
    r.get("penalty_growth", c.penalty_growth);
    r.get("step_size", c.step_size);
    r.finish();
}

void to_json(json& j, const SweepSpec& c) {
    j = json{{"parameter", c.parameter},   {"values", c.values},
             {"values_d", c.values_d},     {"values_u", c.values_u},
             {"schemes", c.schemes},       {"realizations", c.realizations},
             {"base_seed", c.base_seed}};
}

void from_json(const json& j, SweepSpec& c) {
    Reader r(j, "sweep");
    r.get("parameter", c.parameter);
    r.get("values", c.values);
    r.get("values_d", c.values_d);
    r.get("values_u", c.values_u);
    r.get("schemes", c.schemes);
    r.get("realizations", c.realizations);
    r.get("base_seed", c.base_seed);
    r.finish();
}

void to_json(json& j, const RunConfig& c) {
    j = json{{"scenario", c.scenario}, {"gml", c.gml}, {"nlp", c.nlp}, {"sweep", c.sweep}, {"seed", c.seed}};
}

void from_json(const json& j, RunConfig& c) {
    Reader r(j, "config");
    json section;
    section = json::object();
    r.get("scenario", section);
    c.scenario = ScenarioConfig{};
    from_json(section, c.scenario);
    section = json::object();
    r.get("gml", section);
    c.gml = GmlConfig{};
    from_json(section, c.gml);
    section = json::object();
    r.get("nlp", section);
    c.nlp = NlpOptions{};
    from_json(section, c.nlp);
    section = json::object();
    r.get("sweep", section);
    c.sweep = SweepSpec{};
    from_json(section, c.sweep);
    r.get("seed", c.seed);
    r.finish();
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config document: ") + e.what());
    }
    RunConfig c;
    from_json(j, c);
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open config");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::uint64_t config_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace fdisac
