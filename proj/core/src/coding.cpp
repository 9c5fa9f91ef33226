// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/coding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "drsim/llr.hpp"

namespace drsim {

BaseMatrix parse_base_matrix(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    BaseMatrix b;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        if (!have_header) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            if (!(row >> b.rows >> b.cols >> b.lifting_reference))
                throw ParseError("expected header 'rows cols lifting_reference'", lineno);
            if (b.rows <= 0 || b.cols <= b.rows || b.lifting_reference <= 0)
                throw ParseError("invalid base matrix dimensions", lineno);
            have_header = true;
            continue;
        }
        int v = 0;
        while (row >> v) {
            if (v < -1) throw ParseError("shift must be -1 or non-negative", lineno);
            b.entries.push_back(v);
        }
        if (!row.eof()) throw ParseError("non-integer entry", lineno);
    }
    if (!have_header) throw ParseError("missing base matrix header", 0);
    if (b.entries.size() != static_cast<std::size_t>(b.rows) * b.cols)
        throw ParseError("expected " + std::to_string(b.rows * b.cols) + " entries, got " +
                             std::to_string(b.entries.size()),
                         lineno);
    return b;
}

BaseMatrix load_base_matrix(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open base matrix '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_base_matrix(ss.str());
}

LdpcCode::LdpcCode(const BaseMatrix& base, int lifting, int max_iterations, double min_sum_scale)
    : z_(lifting), max_iter_(max_iterations), scale_(min_sum_scale), kb_(base.info_cols()), mb_(base.rows) {
    if (lifting <= 0) throw ConfigError("lifting size must be positive");
    if (max_iterations <= 0) throw ConfigError("max_iterations must be positive");
    if (!(min_sum_scale > 0.0 && min_sum_scale <= 1.0)) throw ConfigError("min-sum scale must be in (0, 1]");
    // The parity part must be the dual-diagonal staircase the encoder assumes.
    for (int r = 0; r < mb_; ++r)
        for (int c = 0; c < mb_; ++c) {
            const int v = base.at(r, kb_ + c);
            const bool expected = (r == c) || (r == c + 1);
            if (expected ? v != 0 : v != -1)
                throw ConfigError("base matrix parity part is not a shift-0 dual-diagonal staircase");
        }
    n_ = static_cast<std::size_t>(base.cols) * z_;
    m_ = static_cast<std::size_t>(mb_) * z_;
    k_ = n_ - m_;
    row_blocks_.resize(mb_);
    for (int r = 0; r < mb_; ++r)
        for (int c = 0; c < base.cols; ++c)
            if (base.at(r, c) >= 0) row_blocks_[r].emplace_back(c, base.at(r, c) % z_);
    for (int r = 0; r < mb_; ++r)
        if (row_blocks_[r].size() < 2) throw ConfigError("base matrix row " + std::to_string(r) + " has fewer than two blocks");
    check_begin_.reserve(m_ + 1);
    for (int r = 0; r < mb_; ++r)
        for (int t = 0; t < z_; ++t) {
            check_begin_.push_back(vars_.size());
            for (auto [c, s] : row_blocks_[r])
                vars_.push_back(static_cast<std::uint32_t>(c * z_ + (t + s) % z_));
        }
    check_begin_.push_back(vars_.size());
}

LdpcCode LdpcCode::for_length(const BaseMatrix& base, std::size_t n, int max_iterations, double min_sum_scale) {
    if (n == 0 || n % static_cast<std::size_t>(base.cols) != 0)
        throw ConfigError("code length " + std::to_string(n) + " is not a multiple of the base matrix width " +
                          std::to_string(base.cols));
    return LdpcCode(base, static_cast<int>(n / base.cols), max_iterations, min_sum_scale);
}

std::vector<Bit> LdpcCode::encode(std::span<const Bit> info) const {
    if (info.size() != k_)
        throw ArgumentError("LDPC encode expects " + std::to_string(k_) + " info bits, got " +
                            std::to_string(info.size()));
    std::vector<Bit> c(n_, 0);
    std::copy(info.begin(), info.end(), c.begin());
    std::vector<Bit> lambda(z_);
    std::vector<Bit> prev(z_, 0);
    for (int r = 0; r < mb_; ++r) {
        std::fill(lambda.begin(), lambda.end(), Bit{0});
        for (auto [col, s] : row_blocks_[r]) {
            if (col >= kb_) continue;
            const Bit* blk = &c[static_cast<std::size_t>(col) * z_];
            for (int t = 0; t < z_; ++t) lambda[t] ^= blk[(t + s) % z_];
        }
        Bit* p = &c[k_ + static_cast<std::size_t>(r) * z_];
        for (int t = 0; t < z_; ++t) p[t] = static_cast<Bit>(lambda[t] ^ prev[t]);
        std::copy(p, p + z_, prev.begin());
    }
    return c;
}

bool LdpcCode::is_codeword(std::span<const Bit> c) const {
    if (c.size() != n_) return false;
    for (std::size_t chk = 0; chk < m_; ++chk) {
        Bit parity = 0;
        for (std::size_t e = check_begin_[chk]; e < check_begin_[chk + 1]; ++e) parity ^= c[vars_[e]];
        if (parity) return false;
    }
    return true;
}

DecodeResult LdpcCode::decode(std::span<const double> llr) const {
    if (llr.size() != n_)
        throw ArgumentError("LDPC decode expects " + std::to_string(n_) + " LLRs, got " + std::to_string(llr.size()));
    std::vector<float> post(n_);
    for (std::size_t i = 0; i < n_; ++i) post[i] = static_cast<float>(llr[i]);
    std::vector<float> msg(vars_.size(), 0.0f);
    std::vector<float> q;
    const float scale = static_cast<float>(scale_);

    DecodeResult res;
    res.codeword.assign(n_, 0);
    auto hard_ok = [&] {
        bool zero = false;
        for (std::size_t i = 0; i < n_; ++i) {
            res.codeword[i] = post[i] < 0.0f ? Bit{1} : Bit{0};
            zero |= post[i] == 0.0f;
        }
        return is_codeword(res.codeword) && !zero;
    };

    for (int it = 1; it <= max_iter_; ++it) {
        for (std::size_t chk = 0; chk < m_; ++chk) {
            const std::size_t b = check_begin_[chk], e = check_begin_[chk + 1];
            const std::size_t deg = e - b;
            q.resize(deg);
            float min1 = std::numeric_limits<float>::infinity(), min2 = min1;
            std::size_t argmin = 0;
            bool neg = false;
            for (std::size_t j = 0; j < deg; ++j) {
                const float v = post[vars_[b + j]] - msg[b + j];
                q[j] = v;
                const float a = std::abs(v);
                neg ^= v < 0.0f;
                if (a < min1) {
                    min2 = min1;
                    min1 = a;
                    argmin = j;
                } else if (a < min2) {
                    min2 = a;
                }
            }
            for (std::size_t j = 0; j < deg; ++j) {
                const float mag = scale * (j == argmin ? min2 : min1);
                const bool sign_neg = neg ^ (q[j] < 0.0f);
                const float m = sign_neg ? -mag : mag;
                msg[b + j] = m;
                post[vars_[b + j]] = q[j] + m;
            }
        }
        res.iterations = it;
        if (hard_ok()) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged) hard_ok();
    res.info_bits.assign(res.codeword.begin(), res.codeword.begin() + static_cast<std::ptrdiff_t>(k_));
    return res;
}

SlotScore score_slot(std::span<const Bit> decoded_info, std::span<const Bit> true_info,
                     std::span<const double> llr_used, std::span<const Bit> true_coded) {
    if (decoded_info.size() != true_info.size()) throw ArgumentError("decoded/true info length mismatch");
    if (llr_used.size() != true_coded.size()) throw ArgumentError("LLR/true coded length mismatch");
    SlotScore s;
    for (std::size_t i = 0; i < true_info.size(); ++i) s.info_bit_errors += decoded_info[i] != true_info[i];
    s.block_error = s.info_bit_errors != 0;
    for (std::size_t i = 0; i < true_coded.size(); ++i) s.coded_bit_errors += hard_bit(llr_used[i]) != true_coded[i];
    return s;
}

SlotScore score_decode(const DecodeResult& dec, std::span<const Bit> true_info, std::span<const double> llr_used,
                       std::span<const Bit> true_coded) {
    auto s = score_slot(dec.info_bits, true_info, llr_used, true_coded);
    s.decoder_iterations = dec.iterations;
    s.converged = dec.converged;
    return s;
}

}  // namespace drsim
