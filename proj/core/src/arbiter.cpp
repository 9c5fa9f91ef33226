// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/arbiter.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "drsim/seed.hpp"

namespace drsim {

void DetectorConfig::validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
    if (!(vote_threshold >= 0.0 && vote_threshold <= 1.0)) throw ConfigError("vote threshold must lie in [0, 1]");
}

void PcwConfig::validate() const {
    if (!(delta_max > 0.0)) throw ConfigError("delta_max must be positive");
}

std::string to_string(DecisionRule r) {
    switch (r) {
        case DecisionRule::Hard: return "hard";
        case DecisionRule::Confidence: return "confidence";
        case DecisionRule::Disjunctive: return "disjunctive";
        case DecisionRule::Conjunctive: return "conjunctive";
    }
    return "?";
}

StreamId output_stream(DecisionRule r) {
    switch (r) {
        case DecisionRule::Hard: return StreamId::R5;
        case DecisionRule::Confidence: return StreamId::R5c;
        case DecisionRule::Disjunctive: return StreamId::R5or;
        case DecisionRule::Conjunctive: return StreamId::R5and;
    }
    return StreamId::R5;
}

namespace {

void check_pair(const LlrVector& l1, const LlrVector& l3) {
    if (l1.size() != l3.size())
        throw ArgumentError("LLR length mismatch: " + std::to_string(l1.size()) + " vs " + std::to_string(l3.size()));
    if (l1.size() == 0) throw ArgumentError("empty LLR vectors");
}

inline bool negative(double v) { return v < 0.0; }

/// 1 iff v < 0. Adding +0.0 turns -0.0 into +0.0, so the sign bit alone
/// matches negative() and the loops below vectorize.
inline std::uint64_t sign_bit(double v) { return std::bit_cast<std::uint64_t>(v + 0.0) >> 63; }

std::size_t count_disagreements(std::span<const double> a, std::span<const double> b) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += sign_bit(a[i]) ^ sign_bit(b[i]);
    return static_cast<std::size_t>(n);
}

std::size_t count_disagreements(const LlrVector& l1, const LlrVector& l3) {
    return count_disagreements(l1.values(), l3.values());
}

}  // namespace

double disagreement(const LlrVector& l1, const LlrVector& l3) {
    check_pair(l1, l3);
    return static_cast<double>(count_disagreements(l1, l3)) / static_cast<double>(l1.size());
}

SlotDecision detect_hard(const LlrVector& l1, const LlrVector& l3, const DetectorConfig& cfg) {
    check_pair(l1, l3);
    SlotDecision dec;
    dec.disagreement_count = count_disagreements(l1, l3);
    dec.d = static_cast<double>(dec.disagreement_count) / static_cast<double>(l1.size());
    dec.verdict = dec.d <= cfg.tau ? Verdict::Trust : Verdict::Rollback;
    return dec;
}

namespace {

inline std::uint64_t abs_key(double v) { return std::bit_cast<std::uint64_t>(std::abs(v)); }

/// Moves lo and hi (hi - lo <= 1) into the buckets of hist that hold them,
/// rebasing both ranks to the start of the lower bucket.
void locate(std::span<const std::uint32_t> hist, std::size_t& lo, std::size_t& hi, std::size_t& b_lo,
            std::size_t& b_hi) {
    constexpr std::size_t kStride = 64;
    std::size_t acc = 0, b = 0;
    for (; b + kStride <= hist.size(); b += kStride) {
        std::uint32_t blk = 0;
        for (std::size_t j = 0; j < kStride; ++j) blk += hist[b + j];
        if (acc + blk > lo) break;
        acc += blk;
    }
    while (acc + hist[b] <= lo) acc += hist[b++];
    b_lo = b;
    lo -= acc;
    hi -= acc;
    acc = 0;
    while (acc + hist[b] <= hi) acc += hist[b++];
    b_hi = b;
}

/// Keeps the keys whose digit lies in [b_lo, b_hi], in place and branch-free.
std::size_t gather(std::uint64_t* keys, std::size_t m, int shift, std::uint64_t mask, std::size_t b_lo,
                   std::size_t b_hi) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t k = keys[i];
        const std::uint64_t d = (k >> shift) & mask;
        keys[w] = k;
        w += (d >= b_lo) & (d <= b_hi);
    }
    return w;
}

/// Order statistics lo and hi (hi - lo <= 1) of |x| by MSD radix selection.
/// The IEEE bits of non-negative doubles sort like the values; a 15-bit top
/// digit and then 12-bit digits narrow the candidates to the bucket(s)
/// holding the two ranks.
std::pair<double, double> abs_order_pair(std::span<const double> x, std::size_t lo, std::size_t hi) {
    constexpr int kTopShift = 48;
    constexpr std::size_t kTopBins = std::size_t{1} << 15;
    constexpr std::size_t kBins = 4096;
    thread_local std::vector<std::uint32_t> top(kTopBins, 0);

    auto key = [](double v) { return std::bit_cast<std::uint64_t>(std::abs(v)); };
    for (double v : x) ++top[key(v) >> kTopShift];
    std::size_t b_lo = 0, b_hi = 0;
    locate(top, lo, hi, b_lo, b_hi);
    std::size_t m = 0;
    for (std::size_t b = b_lo; b <= b_hi; ++b) m += top[b];
    std::fill(top.begin(), top.end(), 0u);
    // The bracket holds a small share of the slot, so this branch is well predicted.
    std::vector<std::uint64_t> keys;
    keys.reserve(m);
    for (double v : x)
        if (const std::uint64_t k = key(v); (k >> kTopShift) - b_lo <= b_hi - b_lo) keys.push_back(k);

    // Once the two ranks split across buckets the remaining candidates no
    // longer share a digit prefix; finish with a sort.
    std::array<std::uint32_t, kBins> hist{};
    int shift = kTopShift;
    while (m > 64 && shift > 0 && b_lo == b_hi) {
        shift = std::max(shift - 12, 0);
        hist.fill(0);
        for (std::size_t i = 0; i < m; ++i) ++hist[(keys[i] >> shift) & (kBins - 1)];
        locate(hist, lo, hi, b_lo, b_hi);
        m = gather(keys.data(), m, shift, kBins - 1, b_lo, b_hi);
    }
    std::sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(m));
    return {std::bit_cast<double>(keys[lo]), std::bit_cast<double>(keys[hi])};
}

}  // namespace

double median_abs(std::span<const double> x) {
    if (x.empty()) throw ArgumentError("median of an empty vector");
    const std::size_t n = x.size();
    const std::size_t hi = n / 2;
    const auto [a, b] = abs_order_pair(x, n % 2 ? hi : hi - 1, hi);
    return n % 2 ? b : 0.5 * (a + b);
}

SlotDecision detect_confidence(const LlrVector& l1, const LlrVector& l3, const DetectorConfig& cfg) {
    check_pair(l1, l3);
    const auto a = l1.values();
    const auto b = l3.values();
    SlotDecision dec;
    std::size_t wins = 0;
    std::size_t disagree = 0;
    const double med1 = median_abs(a);
    const double med3 = median_abs(b);
    const std::size_t n = a.size();
    if (med3 <= 0.0 || med1 <= 0.0) {
        disagree = count_disagreements(l1, l3);
        wins = med3 <= 0.0 ? 0 : disagree;
    } else {
        constexpr std::size_t kBlock = 16;
        for (std::size_t i0 = 0; i0 < n; i0 += kBlock) {
            const std::size_t i1 = std::min(n, i0 + kBlock);
            if (count_disagreements(a.subspan(i0, i1 - i0), b.subspan(i0, i1 - i0)) == 0) continue;
            for (std::size_t i = i0; i < i1; ++i) {
                if (negative(a[i]) == negative(b[i])) continue;
                ++disagree;
                wins += std::abs(b[i]) / med3 > std::abs(a[i]) / med1;
            }
        }
    }
    dec.disagreement_count = disagree;
    dec.d = static_cast<double>(disagree) / static_cast<double>(a.size());
    if (disagree == 0) {
        dec.verdict = Verdict::Trust;
        return dec;
    }
    const double frac = static_cast<double>(wins) / static_cast<double>(disagree);
    dec.confidence_fraction = frac;
    dec.verdict = frac > cfg.vote_threshold ? Verdict::Trust : Verdict::Rollback;
    return dec;
}

SlotDecision detect_disjunctive(const LlrVector& l1, const LlrVector& l3, const DetectorConfig& cfg) {
    const auto h = detect_hard(l1, l3, cfg);
    auto c = detect_confidence(l1, l3, cfg);
    c.verdict = (h.trusted() || c.trusted()) ? Verdict::Trust : Verdict::Rollback;
    return c;
}

SlotDecision detect_conjunctive(const LlrVector& l1, const LlrVector& l3, const DetectorConfig& cfg) {
    const auto h = detect_hard(l1, l3, cfg);
    auto c = detect_confidence(l1, l3, cfg);
    c.verdict = (h.trusted() && c.trusted()) ? Verdict::Trust : Verdict::Rollback;
    return c;
}

SlotDecision detect(DecisionRule rule, const LlrVector& l1, const LlrVector& l3, const DetectorConfig& cfg) {
    switch (rule) {
        case DecisionRule::Hard: return detect_hard(l1, l3, cfg);
        case DecisionRule::Confidence: return detect_confidence(l1, l3, cfg);
        case DecisionRule::Disjunctive: return detect_disjunctive(l1, l3, cfg);
        case DecisionRule::Conjunctive: return detect_conjunctive(l1, l3, cfg);
    }
    throw ArgumentError("unknown decision rule");
}

Combined combine(const LlrVector& l1, const ReceiverOutput& l3, DecisionRule rule, const DetectorConfig& cfg) {
    const StreamId id = output_stream(rule);
    if (std::holds_alternative<HardFailure>(l3)) {
        SlotDecision dec;
        dec.verdict = Verdict::Rollback;
        dec.forced = true;
        return {l1.relabeled(id), dec};
    }
    const auto& neural = std::get<LlrVector>(l3);
    const auto dec = detect(rule, l1, neural, cfg);
    return {(dec.trusted() ? neural : l1).relabeled(id), dec};
}

double pcw_fraction(const LlrVector& l3, std::span<const Bit> true_bits, const PcwConfig& cfg) {
    if (l3.size() != true_bits.size()) throw ArgumentError("LLR/true bit length mismatch");
    if (l3.size() == 0) return 0.0;
    std::size_t n = 0;
    const auto v = l3.values();
    for (std::size_t i = 0; i < v.size(); ++i) n += std::abs(v[i]) > cfg.delta_max && hard_bit(v[i]) != true_bits[i];
    return static_cast<double>(n) / static_cast<double>(v.size());
}

double residual_ber(std::span<const double> l3, std::span<const double> r, std::span<const Bit> true_bits) {
    if (l3.size() != r.size() || l3.size() != true_bits.size()) throw ArgumentError("residual length mismatch");
    if (l3.empty()) return 0.0;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < l3.size(); ++i) errors += hard_bit(l3[i] + r[i]) != true_bits[i];
    return static_cast<double>(errors) / static_cast<double>(l3.size());
}

bool check_bounded_residual(const LlrVector& l3, std::span<const Bit> true_bits, const PcwConfig& cfg,
                            std::size_t residual_trials, std::uint64_t seed) {
    if (residual_trials == 0) throw ArgumentError("residual_trials must be at least 1");
    const double p = pcw_fraction(l3, true_bits, cfg);
    const auto v = l3.values();
    const std::size_t n = v.size();
    std::vector<double> r(n);
    Rng rng(seed);
    bool ok = true;
    for (std::size_t t = 0; t < residual_trials && ok; ++t) {
        if (t < 2) {
            // t = 0 pushes every bit toward its true value, t = 1 away from it.
            const double dir = t == 0 ? 1.0 : -1.0;
            for (std::size_t i = 0; i < n; ++i) r[i] = dir * cfg.delta_max * (true_bits[i] ? -1.0 : 1.0);
        } else {
            for (std::size_t i = 0; i < n; ++i) r[i] = cfg.delta_max * (2.0 * uniform01(rng) - 1.0);
        }
        ok = residual_ber(v, r, true_bits) >= p;
    }
    return ok;
}

bool check_bounded_output(const LlrVector& l1, const LlrVector& l3, const LlrVector& out) {
    const auto o = out.values();
    auto same = [&](std::span<const double> x) { return x.size() == o.size() && std::equal(x.begin(), x.end(), o.begin()); };
    return same(l1.values()) || same(l3.values());
}

bool check_bounded_output(const LlrVector& l1, const ReceiverOutput& l3, const LlrVector& out) {
    if (const auto* v = std::get_if<LlrVector>(&l3)) return check_bounded_output(l1, *v, out);
    const auto o = out.values();
    const auto x = l1.values();
    return x.size() == o.size() && std::equal(x.begin(), x.end(), o.begin());
}

}  // namespace drsim
