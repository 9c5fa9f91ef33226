// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Transmit side of one uplink slot: Gray QAM mapping, type-1 DMRS placement
// and resource-grid assembly. Everything here operates on per-RE
// frequency-domain samples; there is no OFDM waveform.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "drsim/common.hpp"

namespace drsim {

enum class Modulation { Qpsk, Qam16, Qam64 };

int bits_per_symbol(Modulation m);
std::string to_string(Modulation m);
Modulation parse_modulation(const std::string& s);

struct DmrsConfig {
    int additional_positions = 1;
    /// Empty means "derive from additional_positions" ({2}, {2,11}, {2,7,11}).
    std::vector<int> symbol_indices;
    int comb_offset = 0;

    std::vector<int> resolved_symbols() const;
};

struct SlotConfig {
    int n_prb = 26;
    int n_symbols = 14;
    int n_tx = 1;
    int n_rx = 2;
    Modulation modulation = Modulation::Qam16;
    DmrsConfig dmrs{};

    int n_subcarriers() const { return 12 * n_prb; }
    void validate() const;
};

struct ReIndex {
    int subcarrier;
    int symbol;
    bool operator==(const ReIndex&) const = default;
};

/// Pilot positions of one slot, grouped by DMRS symbol, in ascending
/// (symbol, subcarrier) order.
struct DmrsPattern {
    std::vector<int> symbols;
    int comb_offset = 0;
    std::vector<ReIndex> positions;

    bool is_pilot(int subcarrier, int symbol) const;
    std::size_t pilots_per_symbol() const { return symbols.empty() ? 0 : positions.size() / symbols.size(); }
};

DmrsPattern build_dmrs_pattern(const DmrsConfig& cfg, const SlotConfig& slot);

/// Gray-labelled constellation with unit average energy.
class Constellation {
public:
    explicit Constellation(Modulation m);

    Modulation modulation() const { return mod_; }
    int bits_per_symbol() const { return bps_; }
    /// Per-axis amplitude levels indexed by the axis label (bits b0,b2,.. or b1,b3,..).
    std::span<const double> axis_levels() const { return levels_; }
    Complex point(unsigned label) const;
    std::size_t size() const { return std::size_t{1} << bps_; }

private:
    Modulation mod_;
    int bps_;
    std::vector<double> levels_;
};

const Constellation& constellation(Modulation m);

std::vector<Complex> qam_map(std::span<const Bit> bits, Modulation scheme);

/// Nearest-point hard decision, the inverse of qam_map on noiseless symbols.
std::vector<Bit> qam_hard_demap(std::span<const Complex> symbols, Modulation scheme);

/// Complex samples indexed [subcarrier][symbol][antenna], stored contiguously
/// with antenna fastest.
class ResourceGrid {
public:
    ResourceGrid() = default;
    ResourceGrid(int n_subcarriers, int n_symbols, int n_antennas);

    int subcarriers() const { return n_sc_; }
    int symbols() const { return n_sym_; }
    int antennas() const { return n_ant_; }

    Complex& at(int k, int l, int a) { return data_[index(k, l, a)]; }
    const Complex& at(int k, int l, int a) const { return data_[index(k, l, a)]; }

    std::span<Complex> samples() { return data_; }
    std::span<const Complex> samples() const { return data_; }

private:
    std::size_t index(int k, int l, int a) const {
        return (static_cast<std::size_t>(k) * n_sym_ + l) * n_ant_ + a;
    }
    int n_sc_ = 0;
    int n_sym_ = 0;
    int n_ant_ = 0;
    std::vector<Complex> data_;
};

/// Fixed per-configuration layout shared by transmitter and receivers: the
/// pilot pattern and the data REs in mapping order (frequency first, then time).
struct SlotLayout {
    SlotConfig config;
    DmrsPattern dmrs;
    std::vector<ReIndex> data_res;

    std::size_t n_coded_bits() const {
        return data_res.size() * static_cast<std::size_t>(bits_per_symbol(config.modulation));
    }
};

std::shared_ptr<const SlotLayout> make_slot_layout(const SlotConfig& slot);

/// Known pilot symbols, one per DmrsPattern position.
struct PilotSet {
    std::shared_ptr<const SlotLayout> layout;
    std::vector<Complex> values;
};

PilotSet make_pilots(std::shared_ptr<const SlotLayout> layout, std::uint64_t seed);

/// Ground truth retained for scoring. Coded bit j sits on data RE j / Q_m at
/// label position j % Q_m.
struct TransmitRecord {
    std::shared_ptr<const SlotLayout> layout;
    std::vector<Bit> coded_bits;

    ReIndex re_of_bit(std::size_t j) const;
};

struct TxSlot {
    ResourceGrid grid;
    TransmitRecord record;
    PilotSet pilots;
};

TxSlot assemble_tx_grid(std::span<const Bit> coded_bits, std::shared_ptr<const SlotLayout> layout,
                        std::uint64_t pilot_seed);

}  // namespace drsim
