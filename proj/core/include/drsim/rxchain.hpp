// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Conventional receivers: R0 equalizes with the true channel, R1 with an LS
// pilot estimate interpolated bilinearly over the grid. Both use per-RE
// MMSE combining across the receive antennas followed by max-log soft
// demapping of the bias-corrected symbol.

#include <span>
#include <string>
#include <vector>

#include "drsim/channel.hpp"
#include "drsim/grid.hpp"
#include "drsim/llr.hpp"

namespace drsim {

inline constexpr double kLlrClip = 30.0;
inline constexpr double kSinrCap = 1e6;

enum class EstimateMethod { Perfect, LsInterp };

struct ChannelEstimate {
    ResourceGrid h_hat;
    double noise_var_hat = 0.0;
    EstimateMethod method = EstimateMethod::Perfect;
    /// Extra per-RE error variance of the time model, indexed k * n_symbols + l.
    /// Empty when the estimate passes through every pilot symbol.
    std::vector<double> model_error_var;
};

ChannelEstimate perfect_estimate(const ChannelRealization& ch);

/// LS at the pilots, linear interpolation along frequency on each DMRS
/// symbol, then along time; constant extrapolation past the outermost pilots.
/// The noise variance comes from residuals of the pilot LS values against
/// their 3-tap frequency moving average, scaled by 3/2.
/// Time-axis handling of the per-DMRS-symbol estimates. Average uses the mean
/// over all DMRS symbols for every symbol of the slot (a block-fading
/// estimator tuned for low mobility). Its model error is taken from the spread
/// of the DMRS-symbol estimates around that mean, growing quadratically with
/// distance from the DMRS centroid.
enum class TimeInterpolation { Linear, Average };

std::string to_string(TimeInterpolation t);
TimeInterpolation parse_time_interpolation(const std::string& s);

ChannelEstimate estimate_channel_ls(const ResourceGrid& rx, const PilotSet& pilots,
                                    TimeInterpolation time = TimeInterpolation::Linear);

struct EqualizedRe {
    Complex x_hat;
    double post_sinr;
};

std::vector<EqualizedRe> mmse_equalize(const ResourceGrid& rx, const ChannelEstimate& est,
                                       std::span<const ReIndex> data_res);

/// Max-log LLRs for one equalized RE, written to out[0..Q_m).
void soft_demap(const EqualizedRe& re, Modulation scheme, std::span<double> out);

/// soft_demap over a whole slot; LLR magnitudes are clipped to kLlrClip.
std::vector<double> soft_demap_slot(std::span<const EqualizedRe> res, Modulation scheme);

LlrVector receive_r0(const ResourceGrid& rx, const ChannelRealization& true_channel, const SlotLayout& layout);
LlrVector receive_r1(const ResourceGrid& rx, const PilotSet& pilots,
                     TimeInterpolation time = TimeInterpolation::Linear);

}  // namespace drsim
