// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Quasi-cyclic LDPC codes lifted from a base matrix whose parity part is
// dual-diagonal (shift-0 staircase), which gives a linear-time systematic
// encoder. Decoding is layered normalized min-sum, one layer per base row.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drsim/common.hpp"

namespace drsim {

/// Base matrix entries: -1 for an all-zero block, otherwise a cyclic shift
/// coefficient applied modulo the lifting size.
struct BaseMatrix {
    int rows = 0;
    int cols = 0;
    int lifting_reference = 0;
    std::vector<int> entries;

    int at(int r, int c) const { return entries[static_cast<std::size_t>(r) * cols + c]; }
    int info_cols() const { return cols - rows; }
};

/// Text format: '#' comments, then a "rows cols lifting_reference" header,
/// then rows x cols integers.
BaseMatrix parse_base_matrix(const std::string& text);
BaseMatrix load_base_matrix(const std::string& path);

struct DecodeResult {
    std::vector<Bit> info_bits;
    std::vector<Bit> codeword;
    int iterations = 0;
    bool converged = false;
};

class LdpcCode {
public:
    LdpcCode(const BaseMatrix& base, int lifting, int max_iterations = 25, double min_sum_scale = 0.75);

    /// Lifting chosen so that the code length equals n.
    static LdpcCode for_length(const BaseMatrix& base, std::size_t n, int max_iterations = 25,
                               double min_sum_scale = 0.75);

    std::size_t n() const { return n_; }
    std::size_t k() const { return k_; }
    std::size_t m() const { return m_; }
    int lifting() const { return z_; }
    int max_iterations() const { return max_iter_; }
    double min_sum_scale() const { return scale_; }
    double rate() const { return static_cast<double>(k_) / static_cast<double>(n_); }

    std::vector<Bit> encode(std::span<const Bit> info) const;

    /// LLRs positive for bit 0. Early exit once the hard decisions satisfy
    /// every check; converged also requires no exactly-zero posterior.
    DecodeResult decode(std::span<const double> llr) const;

    bool is_codeword(std::span<const Bit> c) const;

private:
    struct Layer {
        std::size_t edge_begin;
        int degree;
    };

    std::size_t n_ = 0, k_ = 0, m_ = 0;
    int z_ = 0;
    int max_iter_ = 25;
    double scale_ = 0.75;
    int kb_ = 0, mb_ = 0;
    // Block-level description: for each base row, the (column, shift) pairs.
    std::vector<std::vector<std::pair<int, int>>> row_blocks_;
    // Expanded check rows in layer order: vars_[edge] for edges of check c are
    // contiguous, checks of one layer are contiguous.
    std::vector<std::uint32_t> vars_;
    std::vector<std::size_t> check_begin_;
};

struct SlotScore {
    bool block_error = false;
    std::size_t coded_bit_errors = 0;
    std::size_t info_bit_errors = 0;
    int decoder_iterations = 0;
    bool converged = false;
};

/// coded_bit_errors counts sign mismatches of llr_used against the true
/// coded bits (sgn(0) = +1 means bit 0).
SlotScore score_slot(std::span<const Bit> decoded_info, std::span<const Bit> true_info,
                     std::span<const double> llr_used, std::span<const Bit> true_coded);

SlotScore score_decode(const DecodeResult& dec, std::span<const Bit> true_info, std::span<const double> llr_used,
                       std::span<const Bit> true_coded);

}  // namespace drsim
