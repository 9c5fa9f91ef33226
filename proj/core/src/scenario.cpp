// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace drsim {

ScenarioAxes Scenario::axes() const {
    return {channel, doppler_hz, delay_spread_s, modulation, dmrs_additional_positions};
}

SlotConfig Scenario::slot_config() const {
    SlotConfig c;
    c.modulation = modulation;
    c.dmrs.additional_positions = dmrs_additional_positions;
    return c;
}

std::vector<double> SweepConfig::default_snr_list() {
    std::vector<double> v;
    for (int s = -2; s <= 18; s += 2) v.push_back(s);
    return v;
}

void SweepConfig::validate() const {
    if (snr_db.empty()) throw ConfigError("SNR list is empty");
    for (std::size_t i = 1; i < snr_db.size(); ++i)
        if (!(snr_db[i] > snr_db[i - 1])) throw ConfigError("SNR list must be strictly ascending");
    for (double s : snr_db)
        if (!std::isfinite(s)) throw ConfigError("SNR values must be finite");
    if (slots_per_point < 1) throw ConfigError("slots per point must be >= 1");
    if (receivers.empty()) throw ConfigError("receiver list is empty");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    detector.validate();
    pcw.validate();
}

bool SweepConfig::wants(StreamId id) const { return std::find(receivers.begin(), receivers.end(), id) != receivers.end(); }

bool SweepConfig::wants_arbiter() const {
    return wants(StreamId::R5) || wants(StreamId::R5c) || wants(StreamId::R5or) || wants(StreamId::R5and);
}

const Scenario& BenchConfig::scenario(int id) const {
    for (const auto& s : scenarios)
        if (s.id == id) return s;
    throw ConfigError("unknown scenario id " + std::to_string(id));
}

std::filesystem::path BenchConfig::resolve(const std::string& file) const {
    std::filesystem::path p(file);
    return p.is_absolute() ? p : data_dir / p;
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("DRSIM_DATA_DIR"); env && *env) return env;
    std::filesystem::path src(DRSIM_SOURCE_DATA_DIR);
    if (std::filesystem::exists(src / "scenarios.yaml")) return src;
    return DRSIM_INSTALL_DATA_DIR;
}

std::filesystem::path default_config_path() { return default_data_dir() / "scenarios.yaml"; }

std::string build_version() { return DRSIM_GIT_DESCRIBE; }

namespace {

template <class T>
T get(const YAML::Node& n, const char* key, const T& fallback) {
    if (!n || !n[key]) return fallback;
    try {
        return n[key].as<T>();
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

void reject_unknown(const YAML::Node& n, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!n) return;
    if (!n.IsMap()) throw ConfigError(where + " must be a mapping");
    for (const auto& kv : n) {
        auto key = kv.first.as<std::string>();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

SurrogateMode parse_mode(const YAML::Node& n) {
    if (!n || !n["type"]) throw ConfigError("policy rule needs mode.type");
    auto type = n["type"].as<std::string>();
    SurrogateMode mode;
    if (type == "genie_boost") {
        reject_unknown(n, {"type", "alpha"}, "genie_boost mode");
        mode = GenieBoost{get<double>(n, "alpha", 0.15)};
    } else if (type == "silent_failure") {
        reject_unknown(n, {"type", "p_wrong", "magnitude_source", "genie_alpha", "confident_fraction"},
                       "silent_failure mode");
        SilentFailure s;
        s.p_wrong = get<double>(n, "p_wrong", s.p_wrong);
        auto src = get<std::string>(n, "magnitude_source", "profile");
        if (src == "profile") s.source = MagnitudeSource::Profile;
        else if (src == "slot") s.source = MagnitudeSource::Slot;
        else throw ConfigError("unknown magnitude_source '" + src + "'");
        s.genie_alpha = get<double>(n, "genie_alpha", s.genie_alpha);
        s.confident_fraction = get<double>(n, "confident_fraction", s.confident_fraction);
        mode = s;
    } else if (type == "miscalibrated") {
        reject_unknown(n, {"type", "scale", "extra_noise"}, "miscalibrated mode");
        Miscalibrated m;
        m.scale = get<double>(n, "scale", m.scale);
        m.extra_noise = get<double>(n, "extra_noise", m.extra_noise);
        mode = m;
    } else if (type == "hard_failure") {
        reject_unknown(n, {"type"}, "hard_failure mode");
        mode = HardFailureMode{};
    } else {
        throw ConfigError("unknown surrogate mode '" + type + "'");
    }
    validate(mode);
    return mode;
}

SurrogatePolicy parse_policy(const YAML::Node& n) {
    if (!n) return SurrogatePolicy::defaults();
    if (!n.IsSequence() || n.size() == 0) throw ConfigError("policy must be a non-empty list of rules");
    SurrogatePolicy p;
    std::vector<PolicyRule> rules;
    for (const auto& r : n) {
        reject_unknown(r, {"match", "mode"}, "policy rule");
        const auto m = r["match"];
        reject_unknown(m, {"modulation", "dmrs_additional_positions", "min_doppler_hz", "channel"}, "policy match");
        PolicyRule rule;
        if (m && m["modulation"]) rule.modulation = parse_modulation(m["modulation"].as<std::string>());
        if (m && m["dmrs_additional_positions"]) rule.dmrs_additional_positions = m["dmrs_additional_positions"].as<int>();
        if (m && m["min_doppler_hz"]) rule.min_doppler_hz = m["min_doppler_hz"].as<double>();
        if (m && m["channel"]) rule.channel = m["channel"].as<std::string>();
        rule.mode = parse_mode(r["mode"]);
        rules.push_back(std::move(rule));
    }
    const auto& last = rules.back();
    if (last.modulation || last.dmrs_additional_positions || last.min_doppler_hz || last.channel)
        throw ConfigError("the last policy rule must have an empty match so every scenario maps to a mode");
    p.fallback = last.mode;
    rules.pop_back();
    p.rules = std::move(rules);
    return p;
}

struct ScenarioFields {
    std::string channel = "CDL-C";
    double delay_spread_ns = 300.0;
    double doppler_hz = 5.0;
    std::string modulation = "QAM16";
    int addpos = 1;
    std::string time_interp = "linear";
};

ScenarioFields apply_fields(ScenarioFields f, const YAML::Node& n) {
    f.channel = get<std::string>(n, "channel", f.channel);
    f.delay_spread_ns = get<double>(n, "delay_spread_ns", f.delay_spread_ns);
    f.doppler_hz = get<double>(n, "doppler_hz", f.doppler_hz);
    f.modulation = get<std::string>(n, "modulation", f.modulation);
    f.addpos = get<int>(n, "dmrs_additional_positions", f.addpos);
    f.time_interp = get<std::string>(n, "r1_time_interpolation", f.time_interp);
    return f;
}

}  // namespace

BenchConfig parse_bench_config(const std::string& yaml_text, const std::filesystem::path& data_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("config root must be a mapping");
    reject_unknown(root, {"sweep", "code", "channel", "profile_aliases", "magnitude_profile", "baseline", "scenarios", "policy"},
                   "config");

    BenchConfig cfg;
    cfg.data_dir = data_dir;
    try {
        const auto sw = root["sweep"];
        reject_unknown(sw, {"snr_db", "slots_per_point", "base_seed", "receivers", "tau", "vote_threshold", "delta_max",
                            "residual_witness_period", "residual_witness_trials"},
                       "sweep");
        cfg.sweep.snr_db = get<std::vector<double>>(sw, "snr_db", SweepConfig::default_snr_list());
        cfg.sweep.slots_per_point = get<std::size_t>(sw, "slots_per_point", 200);
        cfg.sweep.base_seed = get<std::uint64_t>(sw, "base_seed", 1);
        if (sw && sw["receivers"]) {
            cfg.sweep.receivers.clear();
            for (const auto& r : sw["receivers"]) cfg.sweep.receivers.push_back(parse_stream(r.as<std::string>()));
        }
        cfg.sweep.detector.tau = get<double>(sw, "tau", 0.05);
        cfg.sweep.detector.vote_threshold = get<double>(sw, "vote_threshold", 0.5);
        cfg.sweep.pcw.delta_max = get<double>(sw, "delta_max", std::log(4.0));
        cfg.sweep.residual_witness_period = get<std::size_t>(sw, "residual_witness_period", 50);
        cfg.sweep.residual_witness_trials = get<std::size_t>(sw, "residual_witness_trials", 64);

        const auto code = root["code"];
        reject_unknown(code, {"base_matrix", "max_iterations", "min_sum_scale"}, "code");
        cfg.code.base_matrix_file = get<std::string>(code, "base_matrix", cfg.code.base_matrix_file);
        cfg.code.max_iterations = get<int>(code, "max_iterations", 25);
        cfg.code.min_sum_scale = get<double>(code, "min_sum_scale", 0.75);
        if (cfg.code.max_iterations < 1) throw ConfigError("code.max_iterations must be >= 1");
        if (!(cfg.code.min_sum_scale > 0.0 && cfg.code.min_sum_scale <= 1.0))
            throw ConfigError("code.min_sum_scale must lie in (0, 1]");

        const auto ch = root["channel"];
        reject_unknown(ch, {"tap_table", "scatterers", "k_factor_db", "subcarrier_spacing_hz"}, "channel");
        cfg.tap_table_file = get<std::string>(ch, "tap_table", cfg.tap_table_file);
        cfg.channel.scatterers = get<int>(ch, "scatterers", 16);
        cfg.channel.k_factor_db = get<double>(ch, "k_factor_db", 10.0);
        cfg.channel.subcarrier_spacing_hz = get<double>(ch, "subcarrier_spacing_hz", 15e3);
        if (cfg.channel.scatterers < 1) throw ConfigError("channel.scatterers must be >= 1");

        if (const auto al = root["profile_aliases"]) {
            if (!al.IsMap()) throw ConfigError("profile_aliases must be a mapping");
            for (const auto& kv : al) cfg.profile_aliases[kv.first.as<std::string>()] = kv.second.as<std::string>();
        }

        const auto mp = root["magnitude_profile"];
        reject_unknown(mp, {"slots", "alpha"}, "magnitude_profile");
        cfg.magnitude_profile.slots = get<std::size_t>(mp, "slots", 8);
        cfg.magnitude_profile.alpha = get<double>(mp, "alpha", 0.15);
        if (cfg.magnitude_profile.slots < 1) throw ConfigError("magnitude_profile.slots must be >= 1");

        cfg.policy = parse_policy(root["policy"]);

        const std::initializer_list<const char*> scenario_keys = {
            "channel", "delay_spread_ns", "doppler_hz", "modulation", "dmrs_additional_positions",
            "r1_time_interpolation"};
        reject_unknown(root["baseline"], scenario_keys, "baseline");
        const ScenarioFields base = apply_fields(ScenarioFields{}, root["baseline"]);

        const auto list = root["scenarios"];
        if (!list || !list.IsSequence() || list.size() == 0) throw ConfigError("config has no scenarios");
        std::set<int> ids;
        for (const auto& n : list) {
            reject_unknown(n, {"id", "name", "axis", "value", "channel", "delay_spread_ns", "doppler_hz", "modulation",
                               "dmrs_additional_positions", "r1_time_interpolation"},
                           "scenario");
            if (!n["id"] || !n["name"]) throw ConfigError("every scenario needs id and name");
            Scenario s;
            s.id = n["id"].as<int>();
            if (!ids.insert(s.id).second) throw ConfigError("duplicate scenario id " + std::to_string(s.id));
            s.name = n["name"].as<std::string>();
            s.axis = get<std::string>(n, "axis", "-");
            s.value = get<std::string>(n, "value", "");
            const ScenarioFields f = apply_fields(base, n);
            s.channel = f.channel;
            auto alias = cfg.profile_aliases.find(f.channel);
            s.tap_profile = alias == cfg.profile_aliases.end() ? f.channel : alias->second;
            if (!(f.delay_spread_ns >= 0.0)) throw ConfigError("delay spread must be >= 0 in scenario " + s.name);
            if (!(f.doppler_hz >= 0.0)) throw ConfigError("doppler must be >= 0 in scenario " + s.name);
            s.delay_spread_s = f.delay_spread_ns * 1e-9;
            s.doppler_hz = f.doppler_hz;
            s.modulation = parse_modulation(f.modulation);
            if (f.addpos < 0 || f.addpos > 2)
                throw ConfigError("dmrs_additional_positions must be 0, 1 or 2 in scenario " + s.name);
            s.dmrs_additional_positions = f.addpos;
            s.r1_time_interpolation = parse_time_interpolation(f.time_interp);
            s.surrogate_mode = cfg.policy.select(s.axes());
            cfg.scenarios.push_back(std::move(s));
        }
        std::sort(cfg.scenarios.begin(), cfg.scenarios.end(),
                  [](const Scenario& a, const Scenario& b) { return a.id < b.id; });
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    cfg.sweep.validate();
    return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    auto dir = path.parent_path();
    if (dir.empty()) dir = ".";
    BenchConfig cfg = parse_bench_config(ss.str(), dir);
    cfg.source = path;
    return cfg;
}

BenchResources load_resources(const BenchConfig& cfg) {
    BenchResources res;
    res.tap_table = load_tap_table(cfg.resolve(cfg.tap_table_file).string());
    res.base_matrix = load_base_matrix(cfg.resolve(cfg.code.base_matrix_file).string());
    for (const auto& s : cfg.scenarios)
        if (!res.tap_table.count(s.tap_profile))
            throw ConfigError("scenario '" + s.name + "' uses unknown tap profile '" + s.tap_profile + "'");
    return res;
}

const TdlProfile& tap_profile(const BenchResources& res, const Scenario& s) {
    auto it = res.tap_table.find(s.tap_profile);
    if (it == res.tap_table.end()) throw ConfigError("unknown tap profile '" + s.tap_profile + "'");
    return it->second;
}

}  // namespace drsim
