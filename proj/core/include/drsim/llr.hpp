// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "drsim/common.hpp"

namespace drsim {

enum class StreamId { R0, R1, R3, R5, R5c, R5or, R5and };

std::string to_string(StreamId s);
StreamId parse_stream(const std::string& s);

/// Per-bit LLRs of one slot. Positive means bit 0. Construction rejects
/// non-finite values, so every LlrVector in the system is finite.
class LlrVector {
public:
    LlrVector(std::vector<double> values, StreamId id);

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    StreamId stream() const { return id_; }

    /// Same values under another stream label.
    LlrVector relabeled(StreamId id) const { return LlrVector(values_, id, Trusted{}); }

    double max_abs() const;
    bool operator==(const LlrVector& other) const { return values_ == other.values_; }

private:
    struct Trusted {};
    LlrVector(std::vector<double> values, StreamId id, Trusted) : values_(std::move(values)), id_(id) {}
    std::vector<double> values_;
    StreamId id_;
};

/// Bit decision for an LLR: sgn(0) = +1, i.e. bit 0.
inline Bit hard_bit(double llr) { return llr < 0.0 ? Bit{1} : Bit{0}; }

}  // namespace drsim
