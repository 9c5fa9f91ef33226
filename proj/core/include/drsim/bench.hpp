// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drsim/arbiter.hpp"
#include "drsim/scenario.hpp"

namespace drsim {

struct StreamScore {
    bool block_error = true;
    std::size_t coded_bit_errors = 0;
};

/// Everything kept from one simulated slot. Streams R5/R5c/ensembles select
/// R1 or R3 bit-exactly, so their outcome is recomputed from the two cached
/// scores plus the detector statistics; no second decode is needed.
struct SlotRecord {
    std::size_t n_bits = 0;
    std::optional<StreamScore> r0;
    std::optional<StreamScore> r1;
    /// Absent when R3 was not run; block error with all bits wrong on hard failure.
    std::optional<StreamScore> r3;
    bool forced_rollback = false;
    double d = 0.0;
    std::optional<double> confidence_fraction;
    bool confidence_trust = false;
    std::optional<double> pcw;
    std::size_t bounded_output_violations = 0;
    bool residual_checked = false;
    bool residual_ok = true;

    bool hard_trust(double tau) const { return !forced_rollback && d <= tau; }
    bool trusts(DecisionRule rule, double tau) const;
};

struct ReceiverStats {
    StreamId receiver = StreamId::R0;
    std::size_t slots = 0;
    double bler = 0.0;
    double coded_ber = 0.0;
    std::optional<double> rollback_rate;
    std::optional<double> forced_rollback_rate;
    std::optional<double> mean_d;
    std::optional<double> mean_confidence_fraction;
    std::optional<double> pcw;
};

struct SnrPointResult {
    int scenario_id = 0;
    std::string scenario_name;
    double snr_db = 0.0;
    std::vector<ReceiverStats> receivers;

    const ReceiverStats& stats(StreamId id) const;
};

struct ScenarioRun {
    Scenario scenario;
    SweepConfig sweep;
    std::vector<SnrPointResult> points;
    /// records[snr_index][slot_index]
    std::vector<std::vector<SlotRecord>> records;
    std::size_t bounded_output_violations = 0;
    std::size_t residual_checks = 0;
    std::size_t residual_violations = 0;

    std::vector<std::pair<double, double>> bler_curve(StreamId id) const;
    bool property_violation() const { return bounded_output_violations > 0 || residual_violations > 0; }
};

/// Slot-level simulation context shared by all workers of one scenario.
class SlotSimulator {
public:
    SlotSimulator(const BenchConfig& cfg, const BenchResources& res, const Scenario& s, const SweepConfig& sweep,
                  Combiner combiner = combine);

    const LdpcCode& code() const { return code_; }
    const SlotLayout& layout() const { return *layout_; }

    /// Built once per SNR point; only silent-failure with profile magnitudes needs it.
    MagnitudeProfile profile_for(std::size_t snr_index) const;

    SlotRecord simulate(std::size_t snr_index, std::size_t slot_index, const MagnitudeProfile* profile) const;

    /// All intermediate artifacts of one slot, for latency and monitor use.
    struct SlotArtifacts {
        std::vector<Bit> info_bits;
        std::vector<Bit> coded_bits;
        TxSlot tx;
        ChannelRealization channel;
        ResourceGrid rx;
        std::uint64_t surrogate_seed = 0;
    };
    SlotArtifacts generate(std::size_t snr_index, std::size_t slot_index) const;
    ProfilePoint profile_point(double snr_db) const;

private:
    const BenchConfig& cfg_;
    const Scenario& scenario_;
    const SweepConfig& sweep_;
    const TdlProfile& taps_;
    std::shared_ptr<const SlotLayout> layout_;
    LdpcCode code_;
    Combiner combiner_;
};

ScenarioRun run_scenario(const BenchConfig& cfg, const BenchResources& res, const Scenario& s,
                         const SweepConfig& sweep, Combiner combiner = combine);

/// Pure fold from slot records to per-receiver statistics.
SnrPointResult aggregate(const Scenario& s, double snr_db, std::span<const SlotRecord> records,
                         std::span<const StreamId> receivers, const DetectorConfig& det);

struct OperatingSnr {
    std::optional<double> value_db;
    /// Indices of the bracketing pair; absent on Fail or when the first point is already below target.
    std::optional<std::pair<std::size_t, std::size_t>> bracket;
    bool below_range = false;

    bool fail() const { return !value_db.has_value(); }
};

/// First crossing of target, interpolated linearly in log10(BLER); BLER = 0
/// is clamped to 0.5 / slots. A curve already at or below target at its first
/// point returns that SNR with below_range set.
OperatingSnr operating_snr(std::span<const std::pair<double, double>> curve, std::size_t slots,
                           double target = 0.1);

std::string format_operating_snr(const OperatingSnr& op, int precision = 2);

struct BootstrapInterval {
    std::optional<double> lo_db;
    std::optional<double> hi_db;
    double fail_fraction = 0.0;
    std::size_t resamples = 0;
};

/// Percentile interval over slot-level resamples within each SNR point.
BootstrapInterval bootstrap_operating_snr(const ScenarioRun& run, StreamId id, std::size_t resamples,
                                          std::uint64_t seed, double level = 0.95);

struct TauSweepRow {
    int scenario_id = 0;
    std::string scenario_name;
    double tau = 0.0;
    OperatingSnr r5;
    double mean_rollback_rate = 0.0;
};

/// Re-evaluates R5 on the cached records of each run for every tau.
std::vector<TauSweepRow> tau_sweep(std::span<const ScenarioRun> runs, std::span<const double> taus);

std::vector<double> default_taus();

struct MonitorResult {
    bool applicable = false;
    bool length_ok = false;
    bool finite_ok = false;
    double ks = 1.0;
    bool magnitude_ok = false;

    bool pass() const { return applicable && length_ok && finite_ok && magnitude_ok; }
};

/// Output-only plausibility check (shape, finiteness, KS < 0.1 against the
/// in-distribution magnitude profile). Not applicable to a hard failure.
MonitorResult silent_failure_monitor(const ReceiverOutput& l3, std::size_t expected_n, const MagnitudeProfile& profile,
                                     double ks_limit = 0.1);

}  // namespace drsim
