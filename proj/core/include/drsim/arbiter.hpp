// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-slot arbitration between the classical stream (R1) and the neural
// stream (R3): the hard-disagreement detector, the median-normalized
// confidence vote, their OR/AND ensembles, the combiner that forwards exactly
// one of the two vectors, and executable checks of the bounded-output and
// bounded-residual properties.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "drsim/llr.hpp"

namespace drsim {

/// Output of a receiver that could not produce LLRs for this slot.
struct HardFailure {
    std::string reason;
};

using ReceiverOutput = std::variant<LlrVector, HardFailure>;

struct DetectorConfig {
    double tau = 0.05;
    double vote_threshold = 0.5;

    void validate() const;
};

enum class Verdict { Trust, Rollback };

struct SlotDecision {
    Verdict verdict = Verdict::Rollback;
    double d = 0.0;
    std::optional<double> confidence_fraction;
    std::size_t disagreement_count = 0;
    bool forced = false;

    bool trusted() const { return verdict == Verdict::Trust; }
};

enum class DecisionRule { Hard, Confidence, Disjunctive, Conjunctive };

std::string to_string(DecisionRule r);
StreamId output_stream(DecisionRule r);

struct PcwConfig {
    double delta_max = 1.3862943611198906;  // ln 4

    void validate() const;
};

/// Fraction of positions whose signs differ, with sgn(0) = +1.
double disagreement(const LlrVector& l1, const LlrVector& l3);

SlotDecision detect_hard(const LlrVector& l1, const LlrVector& l3, const DetectorConfig& cfg);
SlotDecision detect_confidence(const LlrVector& l1, const LlrVector& l3, const DetectorConfig& cfg = {});
SlotDecision detect_disjunctive(const LlrVector& l1, const LlrVector& l3, const DetectorConfig& cfg);
SlotDecision detect_conjunctive(const LlrVector& l1, const LlrVector& l3, const DetectorConfig& cfg);
SlotDecision detect(DecisionRule rule, const LlrVector& l1, const LlrVector& l3, const DetectorConfig& cfg);

/// Median of |x|; the mean of the two middle values for even lengths.
double median_abs(std::span<const double> x);

struct Combined {
    LlrVector output;
    SlotDecision decision;
};

/// Forwards l3 on trust and l1 otherwise. A hard-failed l3 forces rollback.
Combined combine(const LlrVector& l1, const ReceiverOutput& l3, DecisionRule rule, const DetectorConfig& cfg);

using Combiner = std::function<Combined(const LlrVector&, const ReceiverOutput&, DecisionRule, const DetectorConfig&)>;

/// Fraction of bits with |L| > delta_max whose sign contradicts the true bit.
double pcw_fraction(const LlrVector& l3, std::span<const Bit> true_bits, const PcwConfig& cfg);

/// Bit error rate of the sign decisions of l3 + r.
double residual_ber(std::span<const double> l3, std::span<const double> r, std::span<const Bit> true_bits);

/// Tries the two extreme residuals (+/- delta_max toward / away from the
/// true bits) and residual_trials - 2 uniform residuals in [-delta_max,
/// delta_max]; true iff none brings the BER below pcw_fraction(l3).
bool check_bounded_residual(const LlrVector& l3, std::span<const Bit> true_bits, const PcwConfig& cfg,
                            std::size_t residual_trials, std::uint64_t seed);

/// True iff out equals l1 or l3 elementwise.
bool check_bounded_output(const LlrVector& l1, const LlrVector& l3, const LlrVector& out);
bool check_bounded_output(const LlrVector& l1, const ReceiverOutput& l3, const LlrVector& out);

}  // namespace drsim
