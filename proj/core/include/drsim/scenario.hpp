// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Benchmark configuration: the scenario registry, sweep defaults, code and
// channel parameters, and the scenario -> surrogate policy, all read from one
// YAML file (core/data/scenarios.yaml ships the 16-row default registry).

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drsim/arbiter.hpp"
#include "drsim/channel.hpp"
#include "drsim/coding.hpp"
#include "drsim/grid.hpp"
#include "drsim/llr.hpp"
#include "drsim/rxchain.hpp"
#include "drsim/surrogate.hpp"

namespace drsim {

struct Scenario {
    int id = 0;
    std::string name;
    std::string axis;
    std::string value;
    /// Channel label as registered (CDL-C, TDL-B, ...).
    std::string channel;
    /// Tap table entry actually simulated after alias resolution.
    std::string tap_profile;
    double doppler_hz = 5.0;
    double delay_spread_s = 300e-9;
    Modulation modulation = Modulation::Qam16;
    int dmrs_additional_positions = 1;
    TimeInterpolation r1_time_interpolation = TimeInterpolation::Linear;
    SurrogateMode surrogate_mode = GenieBoost{};

    ScenarioAxes axes() const;
    SlotConfig slot_config() const;
};

struct SweepConfig {
    std::vector<double> snr_db;
    std::size_t slots_per_point = 200;
    std::uint64_t base_seed = 1;
    std::vector<StreamId> receivers{StreamId::R0, StreamId::R1, StreamId::R3, StreamId::R5, StreamId::R5c};
    DetectorConfig detector{};
    PcwConfig pcw{};
    /// Prop-2 witness period on silent-failure scenarios (0 disables).
    std::size_t residual_witness_period = 50;
    std::size_t residual_witness_trials = 64;
    /// Worker threads; results never depend on it.
    std::size_t jobs = 1;

    static std::vector<double> default_snr_list();
    void validate() const;
    bool wants(StreamId id) const;
    bool wants_arbiter() const;
};

struct CodeConfig {
    std::string base_matrix_file = "ldpc_r50_78.txt";
    int max_iterations = 25;
    double min_sum_scale = 0.75;
};

struct MagnitudeProfileConfig {
    std::size_t slots = 8;
    double alpha = 0.15;
};

struct BenchConfig {
    std::filesystem::path source;
    std::filesystem::path data_dir;
    SweepConfig sweep;
    CodeConfig code;
    ChannelOptions channel;
    std::string tap_table_file = "tdl_profiles.txt";
    std::map<std::string, std::string> profile_aliases;
    MagnitudeProfileConfig magnitude_profile;
    SurrogatePolicy policy;
    std::vector<Scenario> scenarios;

    const Scenario& scenario(int id) const;
    std::filesystem::path resolve(const std::string& file) const;
};

/// Data directory: $DRSIM_DATA_DIR, else the source tree, else the install prefix.
std::filesystem::path default_data_dir();
std::filesystem::path default_config_path();

BenchConfig parse_bench_config(const std::string& yaml_text, const std::filesystem::path& data_dir);
BenchConfig load_bench_config(const std::filesystem::path& path);

/// Shared, immutable simulation resources derived from a BenchConfig.
struct BenchResources {
    std::map<std::string, TdlProfile> tap_table;
    BaseMatrix base_matrix;
};

BenchResources load_resources(const BenchConfig& cfg);
const TdlProfile& tap_profile(const BenchResources& res, const Scenario& s);

std::string build_version();

}  // namespace drsim
