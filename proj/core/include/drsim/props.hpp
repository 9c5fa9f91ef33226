// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Standalone property suites for the arbitration layer: bounded output of
// every combiner (Proposition 1) and the bounded-residual floor (Proposition 2).

#include <cstdint>
#include <string>

#include "drsim/arbiter.hpp"
#include "drsim/scenario.hpp"

namespace drsim {

struct PropReport {
    std::string name;
    std::size_t slots = 0;
    std::size_t checks = 0;
    std::size_t violations = 0;
    double seconds = 0.0;

    bool pass() const { return checks > 0 && violations == 0; }
};

struct Prop1Config {
    std::size_t synthetic_slots = 10000;
    /// Simulated slots from the silent-failure, high-Doppler and 64-QAM regimes.
    std::size_t real_slots = 12;
    std::uint64_t seed = 1;
};

/// Runs every decision rule through the combiner on each slot and checks
/// check_bounded_output on the result.
PropReport prop1_suite(const Prop1Config& pc, const Combiner& combiner = combine, const BenchConfig* cfg = nullptr,
                       const BenchResources* res = nullptr);

struct Prop2Config {
    std::size_t synthetic_slots = 1000;
    std::size_t trials = 1000;
    /// Simulated silent-failure slots at full length.
    std::size_t real_slots = 4;
    std::uint64_t seed = 1;
    PcwConfig pcw{};
};

PropReport prop2_suite(const Prop2Config& pc, const BenchConfig* cfg = nullptr, const BenchResources* res = nullptr);

}  // namespace drsim
