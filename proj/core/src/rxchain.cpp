// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/rxchain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace drsim {

ChannelEstimate perfect_estimate(const ChannelRealization& ch) {
    return {ch.h, ch.noise_var, EstimateMethod::Perfect, {}};
}

namespace {

// Linear interpolation of samples known at positions first, first+step, ..
// onto 0..n-1, holding the end values outside the known range.
void interpolate_comb(std::span<const Complex> known, int first, int step, std::span<Complex> out) {
    const int n = static_cast<int>(out.size());
    const int m = static_cast<int>(known.size());
    for (int k = 0; k < n; ++k) {
        if (k <= first) {
            out[k] = known.front();
            continue;
        }
        const int idx = (k - first) / step;
        if (idx >= m - 1) {
            out[k] = known.back();
            continue;
        }
        const double frac = static_cast<double>(k - first - idx * step) / step;
        out[k] = known[idx] + frac * (known[idx + 1] - known[idx]);
    }
}

}  // namespace

std::string to_string(TimeInterpolation t) { return t == TimeInterpolation::Linear ? "linear" : "average"; }

TimeInterpolation parse_time_interpolation(const std::string& s) {
    if (s == "linear") return TimeInterpolation::Linear;
    if (s == "average") return TimeInterpolation::Average;
    throw ConfigError("unknown time interpolation '" + s + "'");
}

ChannelEstimate estimate_channel_ls(const ResourceGrid& rx, const PilotSet& pilots, TimeInterpolation time) {
    if (!pilots.layout) throw ArgumentError("pilot set has no layout");
    const auto& layout = *pilots.layout;
    const auto& dmrs = layout.dmrs;
    const int n_sc = rx.subcarriers();
    const int n_sym = rx.symbols();
    const int n_rx = rx.antennas();
    if (n_sc != layout.config.n_subcarriers() || n_sym != layout.config.n_symbols)
        throw ArgumentError("received grid does not match the pilot layout");
    if (dmrs.positions.empty() || dmrs.symbols.empty()) throw ConfigError("no DMRS pilots in slot");
    const int per_sym = static_cast<int>(dmrs.pilots_per_symbol());
    const int n_dmrs = static_cast<int>(dmrs.symbols.size());

    ChannelEstimate est;
    est.method = EstimateMethod::LsInterp;
    est.h_hat = ResourceGrid(n_sc, n_sym, n_rx);

    // Frequency-interpolated estimates on each DMRS symbol: freq[(d * n_rx + r) * n_sc + k].
    std::vector<Complex> freq(static_cast<std::size_t>(n_dmrs) * n_rx * n_sc);
    std::vector<Complex> ls(per_sym);
    double resid = 0.0;
    std::size_t resid_count = 0;
    for (int d = 0; d < n_dmrs; ++d) {
        for (int r = 0; r < n_rx; ++r) {
            for (int i = 0; i < per_sym; ++i) {
                const std::size_t p = static_cast<std::size_t>(d) * per_sym + i;
                const auto& re = dmrs.positions[p];
                ls[i] = rx.at(re.subcarrier, re.symbol, r) / pilots.values[p];
            }
            for (int i = 1; i + 1 < per_sym; ++i) {
                const Complex avg = (ls[i - 1] + ls[i] + ls[i + 1]) / 3.0;
                resid += std::norm(ls[i] - avg);
                ++resid_count;
            }
            interpolate_comb(ls, dmrs.comb_offset, 2,
                             std::span<Complex>(freq).subspan((static_cast<std::size_t>(d) * n_rx + r) * n_sc, n_sc));
        }
    }
    est.noise_var_hat = resid_count ? 1.5 * resid / static_cast<double>(resid_count) : 0.0;

    if (time == TimeInterpolation::Average) {
        std::vector<double> spread(n_sc, 0.0);
        for (int r = 0; r < n_rx; ++r) {
            for (int k = 0; k < n_sc; ++k) {
                Complex acc{0.0, 0.0};
                for (int d = 0; d < n_dmrs; ++d) acc += freq[(static_cast<std::size_t>(d) * n_rx + r) * n_sc + k];
                acc /= static_cast<double>(n_dmrs);
                for (int d = 0; d < n_dmrs; ++d)
                    spread[k] += std::norm(freq[(static_cast<std::size_t>(d) * n_rx + r) * n_sc + k] - acc);
                for (int l = 0; l < n_sym; ++l) est.h_hat.at(k, l, r) = acc;
            }
        }
        double centroid = 0.0, moment = 0.0;
        for (int l : dmrs.symbols) centroid += l;
        centroid /= n_dmrs;
        for (int l : dmrs.symbols) moment += (l - centroid) * (l - centroid);
        moment /= n_dmrs;
        if (moment > 0.0) {
            est.model_error_var.resize(static_cast<std::size_t>(n_sc) * n_sym);
            for (int k = 0; k < n_sc; ++k) {
                const double e = spread[k] / (static_cast<double>(n_dmrs) * n_rx);
                for (int l = 0; l < n_sym; ++l)
                    est.model_error_var[static_cast<std::size_t>(k) * n_sym + l] =
                        e * (l - centroid) * (l - centroid) / moment;
            }
        }
        return est;
    }

    for (int l = 0; l < n_sym; ++l) {
        int lo = 0, hi = 0;
        double frac = 0.0;
        if (l <= dmrs.symbols.front()) {
            lo = hi = 0;
        } else if (l >= dmrs.symbols.back()) {
            lo = hi = n_dmrs - 1;
        } else {
            while (dmrs.symbols[hi] < l) ++hi;
            lo = dmrs.symbols[hi] == l ? hi : hi - 1;
            if (lo != hi)
                frac = static_cast<double>(l - dmrs.symbols[lo]) / (dmrs.symbols[hi] - dmrs.symbols[lo]);
        }
        for (int r = 0; r < n_rx; ++r) {
            const Complex* a = &freq[(static_cast<std::size_t>(lo) * n_rx + r) * n_sc];
            const Complex* b = &freq[(static_cast<std::size_t>(hi) * n_rx + r) * n_sc];
            for (int k = 0; k < n_sc; ++k) est.h_hat.at(k, l, r) = a[k] + frac * (b[k] - a[k]);
        }
    }
    return est;
}

std::vector<EqualizedRe> mmse_equalize(const ResourceGrid& rx, const ChannelEstimate& est,
                                       std::span<const ReIndex> data_res) {
    if (rx.subcarriers() != est.h_hat.subcarriers() || rx.symbols() != est.h_hat.symbols() ||
        rx.antennas() != est.h_hat.antennas())
        throw ArgumentError("channel estimate dimensions differ from the received grid");
    const bool model_error = !est.model_error_var.empty();
    if (model_error && est.model_error_var.size() != static_cast<std::size_t>(rx.subcarriers()) * rx.symbols())
        throw ArgumentError("model error grid does not match the received grid");
    const int n_rx = rx.antennas();
    const int n_sym = rx.symbols();
    std::vector<EqualizedRe> out(data_res.size());
    for (std::size_t i = 0; i < data_res.size(); ++i) {
        const auto [k, l] = data_res[i];
        const double nv = est.noise_var_hat +
                          (model_error ? est.model_error_var[static_cast<std::size_t>(k) * n_sym + l] : 0.0);
        double g = 0.0;
        Complex num{0.0, 0.0};
        for (int r = 0; r < n_rx; ++r) {
            const Complex h = est.h_hat.at(k, l, r);
            g += std::norm(h);
            num += std::conj(h) * rx.at(k, l, r);
        }
        if (g <= 0.0) {
            out[i] = {Complex{0.0, 0.0}, 0.0};
        } else if (nv <= 0.0) {
            out[i] = {num / g, kSinrCap};
        } else {
            out[i] = {num / (g + nv), std::min(g / nv, kSinrCap)};
        }
    }
    return out;
}

void soft_demap(const EqualizedRe& re, Modulation scheme, std::span<double> out) {
    const auto& c = constellation(scheme);
    const int q = c.bits_per_symbol();
    const int per_axis = q / 2;
    if (static_cast<int>(out.size()) < q) throw ArgumentError("LLR output span too small");
    if (!(re.post_sinr > 0.0)) {
        std::fill(out.begin(), out.begin() + q, 0.0);
        return;
    }
    const double sinr = std::min(re.post_sinr, kSinrCap);
    const double mu = sinr / (1.0 + sinr);
    const Complex z = re.x_hat / mu;
    const double inv_nu = sinr;  // noise variance of z is 1/sinr
    const auto levels = c.axis_levels();
    for (int axis = 0; axis < 2; ++axis) {
        const double v = axis == 0 ? z.real() : z.imag();
        std::array<double, 3> d0{}, d1{};
        d0.fill(std::numeric_limits<double>::infinity());
        d1.fill(std::numeric_limits<double>::infinity());
        for (unsigned label = 0; label < levels.size(); ++label) {
            const double dist = (v - levels[label]) * (v - levels[label]);
            for (int t = 0; t < per_axis; ++t) {
                const bool one = (label >> (per_axis - 1 - t)) & 1u;
                auto& slot = one ? d1[t] : d0[t];
                slot = std::min(slot, dist);
            }
        }
        for (int t = 0; t < per_axis; ++t) {
            const double llr = (d1[t] - d0[t]) * inv_nu;
            out[2 * t + axis] = std::clamp(llr, -kLlrClip, kLlrClip);
        }
    }
}

std::vector<double> soft_demap_slot(std::span<const EqualizedRe> res, Modulation scheme) {
    const auto q = static_cast<std::size_t>(bits_per_symbol(scheme));
    std::vector<double> llr(res.size() * q);
    for (std::size_t i = 0; i < res.size(); ++i) soft_demap(res[i], scheme, std::span<double>(llr).subspan(i * q, q));
    return llr;
}

LlrVector receive_r0(const ResourceGrid& rx, const ChannelRealization& true_channel, const SlotLayout& layout) {
    const auto eq = mmse_equalize(rx, perfect_estimate(true_channel), layout.data_res);
    return LlrVector(soft_demap_slot(eq, layout.config.modulation), StreamId::R0);
}

LlrVector receive_r1(const ResourceGrid& rx, const PilotSet& pilots, TimeInterpolation time) {
    const auto est = estimate_channel_ls(rx, pilots, time);
    const auto eq = mmse_equalize(rx, est, pilots.layout->data_res);
    return LlrVector(soft_demap_slot(eq, pilots.layout->config.modulation), StreamId::R1);
}

}  // namespace drsim
