// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "drsim/bench.hpp"

namespace drsim {

struct LatencyConfig {
    std::size_t reps = 100;
    std::size_t warmup = 10;
    double snr_db = 10.0;
    std::size_t slot_index = 0;

    void validate() const;
};

struct ComponentStats {
    std::string name;
    std::size_t samples = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double std_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
};

/// Sample standard deviation (n - 1); zero for a single sample.
ComponentStats summarize(const std::string& name, std::span<const double> samples_ms);

struct LatencyReport {
    std::vector<ComponentStats> components;
    /// (detect_hard + detect_confidence) / r5_pipeline, by mean wall time.
    double detector_fraction = 0.0;

    const ComponentStats& component(const std::string& name) const;
};

/// Times every component on one fixed slot: r0_chain, r1_chain, r3_surrogate,
/// detect_hard, detect_confidence, ldpc_decode and r5_pipeline (R1 chain, R3,
/// both detectors, stream selection and one decode). Warmup runs are discarded.
LatencyReport latency_bench(const BenchConfig& cfg, const BenchResources& res, const Scenario& s,
                            const LatencyConfig& lc);

}  // namespace drsim
