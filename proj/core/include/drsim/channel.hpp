// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// SIMO tapped-delay-line fading in the per-RE frequency domain. Each tap of
// each receive antenna is an independent sum-of-sinusoids (Jakes-style)
// process sampled once per OFDM symbol; the per-RE response is the tap line's
// DFT at the subcarrier frequency. Ideal CP: no ICI, no ISI.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drsim/grid.hpp"

namespace drsim {

struct Tap {
    double delay_s = 0.0;
    double power_db = 0.0;
    bool line_of_sight = false;
};

struct TdlProfile {
    std::string name;
    std::vector<Tap> taps;
    bool normalized = false;

    /// Linear tap powers rescaled to sum to one; delays sorted ascending.
    TdlProfile normalize() const;
    double rms_delay_spread() const;
};

/// Parses the plain-text tap table ("[NAME]" sections of delay_ns power_db los rows).
std::map<std::string, TdlProfile> parse_tap_table(const std::string& text);
std::map<std::string, TdlProfile> load_tap_table(const std::string& path);

/// Delays multiplied by one scalar so the power-weighted RMS spread hits target_rms.
TdlProfile scale_delay_spread(const TdlProfile& profile, double target_rms);

struct ChannelOptions {
    int scatterers = 16;
    double k_factor_db = 10.0;
    double subcarrier_spacing_hz = 15e3;
    /// 14 symbols per 1 ms slot at 15 kHz.
    double symbol_duration_s = 1e-3 / 14.0;
};

/// Per-rx-antenna Es/N0 with unit signal energy per RE.
struct SnrSpec {
    double snr_db = 0.0;
    double noise_var() const;
};

struct ChannelRealization {
    /// h[k][l][r]; antenna index plays the grid's antenna role.
    ResourceGrid h;
    double noise_var = 0.0;
    std::string profile;
    double doppler_hz = 0.0;
    double delay_spread_s = 0.0;
};

ChannelRealization realize_channel(const TdlProfile& profile, double delay_spread_s, double doppler_hz,
                                   const SlotConfig& slot, std::uint64_t seed,
                                   const ChannelOptions& opts = {});

/// y = h x + n with n ~ CN(0, ch.noise_var) per antenna.
ResourceGrid apply_channel(const ResourceGrid& tx, const ChannelRealization& ch, std::uint64_t seed);

}  // namespace drsim
