// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "drsim/seed.hpp"

namespace drsim {

TdlProfile TdlProfile::normalize() const {
    if (taps.empty()) throw ConfigError("profile '" + name + "' has no taps");
    TdlProfile out = *this;
    std::stable_sort(out.taps.begin(), out.taps.end(),
                     [](const Tap& a, const Tap& b) { return a.delay_s < b.delay_s; });
    double total = 0.0;
    for (const auto& t : out.taps) {
        if (t.delay_s < 0.0) throw ConfigError("profile '" + name + "' has a negative delay");
        total += std::pow(10.0, t.power_db / 10.0);
    }
    const double offset_db = 10.0 * std::log10(total);
    for (auto& t : out.taps) t.power_db -= offset_db;
    out.normalized = true;
    return out;
}

double TdlProfile::rms_delay_spread() const {
    double p = 0.0, m1 = 0.0, m2 = 0.0;
    for (const auto& t : taps) {
        const double w = std::pow(10.0, t.power_db / 10.0);
        p += w;
        m1 += w * t.delay_s;
        m2 += w * t.delay_s * t.delay_s;
    }
    if (p <= 0.0) return 0.0;
    const double mean = m1 / p;
    return std::sqrt(std::max(0.0, m2 / p - mean * mean));
}

std::map<std::string, TdlProfile> parse_tap_table(const std::string& text) {
    std::map<std::string, TdlProfile> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    TdlProfile* current = nullptr;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '[') {
            const auto close = line.find(']', first);
            if (close == std::string::npos) throw ParseError("unterminated profile header", lineno);
            const std::string name = line.substr(first + 1, close - first - 1);
            if (name.empty()) throw ParseError("empty profile name", lineno);
            if (out.count(name)) throw ParseError("duplicate profile '" + name + "'", lineno);
            current = &out[name];
            current->name = name;
            continue;
        }
        if (!current) throw ParseError("tap row before any [PROFILE] header", lineno);
        std::istringstream row(line);
        double delay_ns = 0.0, power_db = 0.0;
        int los = 0;
        if (!(row >> delay_ns >> power_db >> los)) throw ParseError("expected 'delay_ns power_db los_flag'", lineno);
        std::string extra;
        if (row >> extra) throw ParseError("trailing field '" + extra + "'", lineno);
        if (los != 0 && los != 1) throw ParseError("los_flag must be 0 or 1", lineno);
        if (delay_ns < 0.0) throw ParseError("negative delay", lineno);
        current->taps.push_back({delay_ns * 1e-9, power_db, los == 1});
    }
    for (auto& [name, prof] : out) {
        if (prof.taps.empty()) throw ParseError("profile '" + name + "' has no taps", 0);
        prof = prof.normalize();
    }
    return out;
}

std::map<std::string, TdlProfile> load_tap_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open tap table '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_tap_table(ss.str());
}

TdlProfile scale_delay_spread(const TdlProfile& profile, double target_rms) {
    if (profile.taps.empty()) throw ConfigError("profile '" + profile.name + "' has no taps");
    if (target_rms < 0.0) throw ArgumentError("target RMS delay spread must be non-negative");
    const double current = profile.rms_delay_spread();
    if (current <= 0.0 || target_rms <= 0.0) {
        if (current <= 0.0 && target_rms <= 0.0) return profile;
        throw ArgumentError("RMS delay spread " + std::to_string(target_rms) + " s unachievable for profile '" +
                            profile.name + "'");
    }
    TdlProfile out = profile;
    const double factor = target_rms / current;
    for (auto& t : out.taps) t.delay_s *= factor;
    return out;
}

double SnrSpec::noise_var() const { return std::pow(10.0, -snr_db / 10.0); }

ChannelRealization realize_channel(const TdlProfile& profile, double delay_spread_s, double doppler_hz,
                                   const SlotConfig& slot, std::uint64_t seed, const ChannelOptions& opts) {
    if (profile.taps.empty()) throw ConfigError("profile '" + profile.name + "' has no taps");
    if (doppler_hz < 0.0) throw ArgumentError("Doppler must be non-negative");
    if (opts.scatterers <= 0) throw ConfigError("scatterer count must be positive");
    const TdlProfile norm = profile.normalized ? profile : profile.normalize();
    const TdlProfile prof = delay_spread_s > 0.0 ? scale_delay_spread(norm, delay_spread_s) : norm;

    const int n_sc = slot.n_subcarriers();
    const int n_sym = slot.n_symbols;
    const int n_rx = slot.n_rx;
    const std::size_t n_taps = prof.taps.size();
    constexpr double two_pi = 2.0 * std::numbers::pi;

    Rng rng(seed);
    const double k_lin = std::pow(10.0, opts.k_factor_db / 10.0);
    const double wd = two_pi * doppler_hz;
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(opts.scatterers));

    // gains[(tap * n_rx + r) * n_sym + l]
    std::vector<Complex> gains(n_taps * n_rx * n_sym);
    for (std::size_t t = 0; t < n_taps; ++t) {
        const double amp = std::sqrt(std::pow(10.0, prof.taps[t].power_db / 10.0));
        const bool los = prof.taps[t].line_of_sight;
        const double diffuse = los ? std::sqrt(1.0 / (k_lin + 1.0)) : 1.0;
        for (int r = 0; r < n_rx; ++r) {
            std::vector<double> freq(opts.scatterers), phase(opts.scatterers);
            for (int m = 0; m < opts.scatterers; ++m) {
                freq[m] = wd * std::cos(two_pi * uniform01(rng));
                phase[m] = two_pi * uniform01(rng);
            }
            double los_freq = 0.0, los_phase = 0.0;
            if (los) {
                los_freq = wd * std::cos(two_pi * uniform01(rng));
                los_phase = two_pi * uniform01(rng);
            }
            for (int l = 0; l < n_sym; ++l) {
                const double time = l * opts.symbol_duration_s;
                Complex g{0.0, 0.0};
                for (int m = 0; m < opts.scatterers; ++m) g += std::polar(1.0, freq[m] * time + phase[m]);
                g *= diffuse * inv_sqrt_m;
                if (los) g += std::sqrt(k_lin / (k_lin + 1.0)) * std::polar(1.0, los_freq * time + los_phase);
                gains[(t * n_rx + r) * n_sym + l] = amp * g;
            }
        }
    }

    ChannelRealization ch;
    ch.h = ResourceGrid(n_sc, n_sym, n_rx);
    ch.profile = prof.name;
    ch.doppler_hz = doppler_hz;
    ch.delay_spread_s = prof.rms_delay_spread();
    std::vector<Complex> ramp(n_taps);
    for (int k = 0; k < n_sc; ++k) {
        const double f = (k - n_sc / 2) * opts.subcarrier_spacing_hz;
        for (std::size_t t = 0; t < n_taps; ++t) ramp[t] = std::polar(1.0, -two_pi * f * prof.taps[t].delay_s);
        for (int l = 0; l < n_sym; ++l)
            for (int r = 0; r < n_rx; ++r) {
                Complex acc{0.0, 0.0};
                for (std::size_t t = 0; t < n_taps; ++t) acc += gains[(t * n_rx + r) * n_sym + l] * ramp[t];
                ch.h.at(k, l, r) = acc;
            }
    }
    return ch;
}

ResourceGrid apply_channel(const ResourceGrid& tx, const ChannelRealization& ch, std::uint64_t seed) {
    if (tx.antennas() != 1) throw ArgumentError("transmit grid must have exactly one antenna");
    if (tx.subcarriers() != ch.h.subcarriers() || tx.symbols() != ch.h.symbols())
        throw ArgumentError("channel and transmit grid dimensions differ");
    if (ch.noise_var < 0.0) throw ArgumentError("noise variance must be non-negative");
    const int n_rx = ch.h.antennas();
    ResourceGrid y(tx.subcarriers(), tx.symbols(), n_rx);
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(ch.noise_var / 2.0));
    const bool noisy = ch.noise_var > 0.0;
    for (int k = 0; k < tx.subcarriers(); ++k)
        for (int l = 0; l < tx.symbols(); ++l) {
            const Complex x = tx.at(k, l, 0);
            for (int r = 0; r < n_rx; ++r) {
                Complex v = ch.h.at(k, l, r) * x;
                if (noisy) v += Complex(gauss(rng), gauss(rng));
                y.at(k, l, r) = v;
            }
        }
    return y;
}

}  // namespace drsim
