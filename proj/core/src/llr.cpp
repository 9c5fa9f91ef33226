// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/llr.hpp"

#include <algorithm>
#include <cmath>

namespace drsim {

std::string to_string(StreamId s) {
    switch (s) {
        case StreamId::R0: return "R0";
        case StreamId::R1: return "R1";
        case StreamId::R3: return "R3";
        case StreamId::R5: return "R5";
        case StreamId::R5c: return "R5c";
        case StreamId::R5or: return "R5or";
        case StreamId::R5and: return "R5and";
    }
    return "?";
}

StreamId parse_stream(const std::string& s) {
    for (auto id : {StreamId::R0, StreamId::R1, StreamId::R3, StreamId::R5, StreamId::R5c, StreamId::R5or,
                    StreamId::R5and})
        if (to_string(id) == s) return id;
    throw ConfigError("unknown receiver '" + s + "'");
}

LlrVector::LlrVector(std::vector<double> values, StreamId id) : values_(std::move(values)), id_(id) {
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i])) throw ArgumentError("non-finite LLR at index " + std::to_string(i));
}

double LlrVector::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace drsim
