// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drsim/seed.hpp"

namespace drsim {

int bits_per_symbol(Modulation m) {
    switch (m) {
        case Modulation::Qpsk: return 2;
        case Modulation::Qam16: return 4;
        case Modulation::Qam64: return 6;
    }
    throw ArgumentError("unknown modulation");
}

std::string to_string(Modulation m) {
    switch (m) {
        case Modulation::Qpsk: return "QPSK";
        case Modulation::Qam16: return "16-QAM";
        case Modulation::Qam64: return "64-QAM";
    }
    return "?";
}

Modulation parse_modulation(const std::string& s) {
    std::string u;
    for (char c : s)
        if (c != '-' && c != '_') u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (u == "QPSK") return Modulation::Qpsk;
    if (u == "16QAM" || u == "QAM16") return Modulation::Qam16;
    if (u == "64QAM" || u == "QAM64") return Modulation::Qam64;
    throw ConfigError("unknown modulation '" + s + "'");
}

std::vector<int> DmrsConfig::resolved_symbols() const {
    if (!symbol_indices.empty()) return symbol_indices;
    switch (additional_positions) {
        case 0: return {2};
        case 1: return {2, 11};
        case 2: return {2, 7, 11};
        default: throw ConfigError("DMRS additional_positions must be 0, 1 or 2, got " +
                                   std::to_string(additional_positions));
    }
}

void SlotConfig::validate() const {
    if (n_prb < 0) throw ConfigError("n_prb must be non-negative");
    if (n_symbols <= 0) throw ConfigError("n_symbols must be positive");
    if (n_tx != 1) throw ConfigError("only single-layer SIMO (n_tx = 1) is supported");
    if (n_rx <= 0) throw ConfigError("n_rx must be positive");
    if (dmrs.comb_offset != 0 && dmrs.comb_offset != 1) throw ConfigError("DMRS comb_offset must be 0 or 1");
    const auto syms = dmrs.resolved_symbols();
    if (!dmrs.symbol_indices.empty() &&
        static_cast<int>(dmrs.symbol_indices.size()) != dmrs.additional_positions + 1)
        throw ConfigError("DMRS symbol list does not match additional_positions");
    if (!std::is_sorted(syms.begin(), syms.end()) ||
        std::adjacent_find(syms.begin(), syms.end()) != syms.end())
        throw ConfigError("DMRS symbols must be strictly ascending");
    for (int s : syms)
        if (s < 0 || s >= n_symbols) throw ConfigError("DMRS symbol index outside the slot");
}

bool DmrsPattern::is_pilot(int subcarrier, int symbol) const {
    if (!std::binary_search(symbols.begin(), symbols.end(), symbol)) return false;
    return (subcarrier & 1) == comb_offset;
}

DmrsPattern build_dmrs_pattern(const DmrsConfig& cfg, const SlotConfig& slot) {
    SlotConfig s = slot;
    s.dmrs = cfg;
    s.validate();
    DmrsPattern p;
    p.symbols = cfg.resolved_symbols();
    p.comb_offset = cfg.comb_offset;
    for (int l : p.symbols)
        for (int k = cfg.comb_offset; k < s.n_subcarriers(); k += 2) p.positions.push_back({k, l});
    return p;
}

Constellation::Constellation(Modulation m) : mod_(m), bps_(drsim::bits_per_symbol(m)) {
    // Per-axis levels from the TS 38.211 formulas. For an axis carrying bits
    // (c0, c1, c2) the amplitude is (1-2c0)(4-(1-2c1)(2-(1-2c2))) for 64-QAM,
    // (1-2c0)(2-(1-2c1)) for 16-QAM and (1-2c0) for QPSK, before scaling.
    const int per_axis = bps_ / 2;
    const double scale = m == Modulation::Qpsk ? 1.0 / std::sqrt(2.0)
                         : m == Modulation::Qam16 ? 1.0 / std::sqrt(10.0)
                                                  : 1.0 / std::sqrt(42.0);
    levels_.resize(std::size_t{1} << per_axis);
    for (unsigned label = 0; label < levels_.size(); ++label) {
        auto c = [&](int i) { return 1.0 - 2.0 * ((label >> (per_axis - 1 - i)) & 1u); };
        double a = 0.0;
        if (per_axis == 1) a = c(0);
        else if (per_axis == 2) a = c(0) * (2.0 - c(1));
        else a = c(0) * (4.0 - c(1) * (2.0 - c(2)));
        levels_[label] = a * scale;
    }
}

Complex Constellation::point(unsigned label) const {
    // Even label positions (b0, b2, ..) drive I, odd ones drive Q.
    const int per_axis = bps_ / 2;
    unsigned li = 0, lq = 0;
    for (int i = 0; i < per_axis; ++i) {
        li = (li << 1) | ((label >> (bps_ - 1 - 2 * i)) & 1u);
        lq = (lq << 1) | ((label >> (bps_ - 2 - 2 * i)) & 1u);
    }
    return {levels_[li], levels_[lq]};
}

const Constellation& constellation(Modulation m) {
    static const Constellation qpsk(Modulation::Qpsk);
    static const Constellation q16(Modulation::Qam16);
    static const Constellation q64(Modulation::Qam64);
    switch (m) {
        case Modulation::Qpsk: return qpsk;
        case Modulation::Qam16: return q16;
        case Modulation::Qam64: return q64;
    }
    throw ArgumentError("unknown modulation");
}

std::vector<Complex> qam_map(std::span<const Bit> bits, Modulation scheme) {
    const auto& c = constellation(scheme);
    const auto q = static_cast<std::size_t>(c.bits_per_symbol());
    if (bits.size() % q != 0)
        throw ArgumentError("bit count " + std::to_string(bits.size()) + " not divisible by " +
                            std::to_string(q));
    std::vector<Complex> out(bits.size() / q);
    for (std::size_t s = 0; s < out.size(); ++s) {
        unsigned label = 0;
        for (std::size_t i = 0; i < q; ++i) label = (label << 1) | (bits[s * q + i] & 1u);
        out[s] = c.point(label);
    }
    return out;
}

std::vector<Bit> qam_hard_demap(std::span<const Complex> symbols, Modulation scheme) {
    const auto& c = constellation(scheme);
    const auto q = static_cast<std::size_t>(c.bits_per_symbol());
    std::vector<Bit> out(symbols.size() * q);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        unsigned best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (unsigned label = 0; label < c.size(); ++label) {
            const double d = std::norm(symbols[s] - c.point(label));
            if (d < best_d) {
                best_d = d;
                best = label;
            }
        }
        for (std::size_t i = 0; i < q; ++i) out[s * q + i] = static_cast<Bit>((best >> (q - 1 - i)) & 1u);
    }
    return out;
}

ResourceGrid::ResourceGrid(int n_subcarriers, int n_symbols, int n_antennas)
    : n_sc_(n_subcarriers), n_sym_(n_symbols), n_ant_(n_antennas),
      data_(static_cast<std::size_t>(n_subcarriers) * n_symbols * n_antennas) {
    if (n_subcarriers < 0 || n_symbols < 0 || n_antennas < 0) throw ArgumentError("negative grid dimension");
}

std::shared_ptr<const SlotLayout> make_slot_layout(const SlotConfig& slot) {
    slot.validate();
    auto layout = std::make_shared<SlotLayout>();
    layout->config = slot;
    layout->dmrs = build_dmrs_pattern(slot.dmrs, slot);
    for (int l = 0; l < slot.n_symbols; ++l)
        for (int k = 0; k < slot.n_subcarriers(); ++k)
            if (!layout->dmrs.is_pilot(k, l)) layout->data_res.push_back({k, l});
    return layout;
}

PilotSet make_pilots(std::shared_ptr<const SlotLayout> layout, std::uint64_t seed) {
    PilotSet p;
    Rng rng(seed);
    const double a = 1.0 / std::sqrt(2.0);
    p.values.reserve(layout->dmrs.positions.size());
    for (std::size_t i = 0; i < layout->dmrs.positions.size(); ++i) {
        const auto r = rng();
        p.values.emplace_back((r & 1u) ? -a : a, (r & 2u) ? -a : a);
    }
    p.layout = std::move(layout);
    return p;
}

ReIndex TransmitRecord::re_of_bit(std::size_t j) const {
    return layout->data_res.at(j / static_cast<std::size_t>(bits_per_symbol(layout->config.modulation)));
}

TxSlot assemble_tx_grid(std::span<const Bit> coded_bits, std::shared_ptr<const SlotLayout> layout,
                        std::uint64_t pilot_seed) {
    if (!layout) throw ArgumentError("null slot layout");
    const auto& cfg = layout->config;
    if (coded_bits.size() != layout->n_coded_bits())
        throw ArgumentError("expected " + std::to_string(layout->n_coded_bits()) + " coded bits, got " +
                            std::to_string(coded_bits.size()));
    TxSlot tx;
    tx.grid = ResourceGrid(cfg.n_subcarriers(), cfg.n_symbols, 1);
    const auto symbols = qam_map(coded_bits, cfg.modulation);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const auto& re = layout->data_res[i];
        tx.grid.at(re.subcarrier, re.symbol, 0) = symbols[i];
    }
    tx.pilots = make_pilots(layout, pilot_seed);
    for (std::size_t i = 0; i < layout->dmrs.positions.size(); ++i) {
        const auto& re = layout->dmrs.positions[i];
        tx.grid.at(re.subcarrier, re.symbol, 0) = tx.pilots.values[i];
    }
    tx.record.layout = layout;
    tx.record.coded_bits.assign(coded_bits.begin(), coded_bits.end());
    return tx;
}

}  // namespace drsim
