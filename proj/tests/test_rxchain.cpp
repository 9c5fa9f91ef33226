// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "drsim/bench.hpp"
#include "drsim/rxchain.hpp"
#include "drsim/seed.hpp"

using namespace drsim;

namespace {
constexpr std::size_t kBaselineR0Errors6dB = 346749;
}

namespace {

ResourceGrid grid_of(std::initializer_list<Complex> per_antenna) {
    ResourceGrid g(1, 1, static_cast<int>(per_antenna.size()));
    int r = 0;
    for (auto v : per_antenna) g.at(0, 0, r++) = v;
    return g;
}

ChannelEstimate estimate_of(std::initializer_list<Complex> h, double nv) {
    ChannelEstimate e;
    e.h_hat = grid_of(h);
    e.noise_var_hat = nv;
    return e;
}

std::vector<Bit> random_bits(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Bit> b(n);
    for (auto& x : b) x = static_cast<Bit>(rng() & 1u);
    return b;
}

/// Exact max-log LLRs by exhaustive search over the 2-D constellation.
std::vector<double> brute_max_log(Complex z, double nu, Modulation m) {
    const auto& c = constellation(m);
    const int q = c.bits_per_symbol();
    std::vector<double> out(q);
    for (int t = 0; t < q; ++t) {
        double d0 = std::numeric_limits<double>::infinity(), d1 = d0;
        for (unsigned l = 0; l < c.size(); ++l) {
            const double d = std::norm(z - c.point(l)) / nu;
            if ((l >> (q - 1 - t)) & 1u) d1 = std::min(d1, d);
            else d0 = std::min(d0, d);
        }
        out[t] = d1 - d0;
    }
    return out;
}

std::size_t sign_errors(const LlrVector& l, std::span<const Bit> bits) {
    std::size_t e = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) e += hard_bit(l[j]) != bits[j];
    return e;
}

struct Link {
    std::shared_ptr<const SlotLayout> layout;
    std::vector<Bit> bits;
    TxSlot tx;
    ChannelRealization ch;
    ResourceGrid rx;
};

Link make_link(const SlotConfig& s, const TdlProfile& prof, double doppler, double snr_db, std::uint64_t seed) {
    Link k;
    k.layout = make_slot_layout(s);
    k.bits = random_bits(k.layout->n_coded_bits(), derive_seed(seed, {1}));
    k.tx = assemble_tx_grid(k.bits, k.layout, derive_seed(seed, {2}));
    k.ch = realize_channel(prof, 300e-9, doppler, s, derive_seed(seed, {3}));
    k.ch.noise_var = SnrSpec{snr_db}.noise_var();
    k.rx = apply_channel(k.tx.grid, k.ch, derive_seed(seed, {4}));
    return k;
}

Link flat_link(const SlotConfig& s, Complex c, double noise_var, std::uint64_t seed) {
    Link k;
    k.layout = make_slot_layout(s);
    k.bits = random_bits(k.layout->n_coded_bits(), derive_seed(seed, {1}));
    k.tx = assemble_tx_grid(k.bits, k.layout, derive_seed(seed, {2}));
    k.ch.h = ResourceGrid(s.n_subcarriers(), s.n_symbols, s.n_rx);
    for (auto& v : k.ch.h.samples()) v = c;
    k.ch.noise_var = noise_var;
    k.rx = apply_channel(k.tx.grid, k.ch, derive_seed(seed, {4}));
    return k;
}

const TdlProfile& tdl_c() {
    static const TdlProfile p = load_tap_table((default_data_dir() / "tdl_profiles.txt").string()).at("TDL-C");
    return p;
}

}  // namespace

TEST(RxChain, MmseExamples) {
    const Complex y0{0.7, -0.2}, y1{-0.1, 0.4};
    ReIndex re{0, 0};
    auto a = mmse_equalize(grid_of({y0, y1}), estimate_of({1.0, 0.0}, 1.0), std::span(&re, 1));
    EXPECT_NEAR(std::abs(a[0].x_hat - y0 / 2.0), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(a[0].post_sinr, 1.0);

    const Complex x{0.3, -0.9};
    auto b = mmse_equalize(grid_of({x, x}), estimate_of({1.0, 1.0}, 1e-12), std::span(&re, 1));
    EXPECT_NEAR(std::abs(b[0].x_hat - x), 0.0, 1e-11);
    EXPECT_EQ(b[0].post_sinr, kSinrCap);

    auto c = mmse_equalize(grid_of({y0, y1}), estimate_of({0.0, 0.0}, 0.0), std::span(&re, 1));
    EXPECT_EQ(c[0].x_hat, Complex(0.0, 0.0));
    EXPECT_EQ(c[0].post_sinr, 0.0);
    std::vector<double> llr(6, 1.0);
    soft_demap(c[0], Modulation::Qam64, llr);
    for (double v : llr) EXPECT_EQ(v, 0.0);
}

TEST(RxChain, QpskLlrExample) {
    // z = (1+j)/sqrt(2) with noise variance 1: 4 Re(z) / (sqrt(2) nu) = 2.
    std::vector<double> llr(2);
    const double sinr = 1.0;
    const double mu = sinr / (1.0 + sinr);
    soft_demap({Complex(1.0, 1.0) / std::sqrt(2.0) * mu, sinr}, Modulation::Qpsk, llr);
    EXPECT_NEAR(llr[0], 2.0, 1e-12);
    EXPECT_NEAR(llr[1], 2.0, 1e-12);
}

TEST(RxChain, SoftDemapMatchesBruteForce) {
    Rng rng(21);
    for (auto m : {Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64}) {
        const int q = bits_per_symbol(m);
        std::vector<double> llr(q);
        for (int trial = 0; trial < 2000; ++trial) {
            const Complex z(3.0 * (uniform01(rng) - 0.5), 3.0 * (uniform01(rng) - 0.5));
            const double sinr = std::pow(10.0, 3.0 * uniform01(rng) - 1.0);
            const double mu = sinr / (1.0 + sinr);
            soft_demap({z * mu, sinr}, m, llr);
            const auto ref = brute_max_log(z, 1.0 / sinr, m);
            for (int t = 0; t < q; ++t)
                EXPECT_NEAR(llr[t], std::clamp(ref[t], -kLlrClip, kLlrClip), 1e-9 * std::max(1.0, std::abs(ref[t])));
        }
    }
}

TEST(RxChain, ErasureAndNoiselessDecisions) {
    std::vector<double> llr(4, 7.0);
    soft_demap({Complex(0.5, 0.5), 0.0}, Modulation::Qam16, llr);
    for (double v : llr) EXPECT_EQ(v, 0.0);
    const auto& c = constellation(Modulation::Qam16);
    for (unsigned l = 0; l < 16; ++l) {
        soft_demap({c.point(l) * (kSinrCap / (1.0 + kSinrCap)), kSinrCap}, Modulation::Qam16, llr);
        for (int t = 0; t < 4; ++t) EXPECT_EQ(hard_bit(llr[t]), (l >> (3 - t)) & 1u) << l;
    }
}

TEST(RxChain, QpskMonotoneInEachAxis) {
    std::vector<double> prev(2), cur(2);
    const double sinr = 2.0, mu = sinr / (1.0 + sinr);
    for (int i = 0; i <= 200; ++i) {
        const double v = -2.0 + 0.02 * i;
        soft_demap({Complex(v, -v) * mu, sinr}, Modulation::Qpsk, cur);
        if (i > 0) {
            EXPECT_GT(cur[0], prev[0]);
            EXPECT_LT(cur[1], prev[1]);
        }
        prev = cur;
    }
}

TEST(RxChain, LsExactOnFlatNoiselessChannel) {
    SlotConfig s;
    const Complex c{0.6, -0.8};
    for (int addpos : {0, 1, 2}) {
        s.dmrs.additional_positions = addpos;
        Link k = flat_link(s, c, 0.0, 3);
        const auto est = estimate_channel_ls(k.rx, k.tx.pilots);
        EXPECT_NEAR(est.noise_var_hat, 0.0, 1e-28);
        EXPECT_EQ(est.method, EstimateMethod::LsInterp);
        for (auto v : est.h_hat.samples()) ASSERT_NEAR(std::abs(v - c), 0.0, 1e-14);
        const auto r0 = receive_r0(k.rx, k.ch, *k.layout);
        const auto r1 = receive_r1(k.rx, k.tx.pilots);
        EXPECT_EQ(sign_errors(r0, k.bits), 0u);
        for (std::size_t j = 0; j < r0.size(); ++j) ASSERT_EQ(hard_bit(r0[j]), hard_bit(r1[j]));
    }
}

TEST(RxChain, LsExactOnLinearFrequencyRamp) {
    SlotConfig s;
    Link k = flat_link(s, 1.0, 0.0, 4);
    for (int sc = 0; sc < s.n_subcarriers(); ++sc)
        for (int l = 0; l < s.n_symbols; ++l)
            for (int r = 0; r < s.n_rx; ++r) k.ch.h.at(sc, l, r) = Complex(1.0 + 0.01 * sc, 0.5 - 0.002 * sc * (r + 1));
    k.rx = apply_channel(k.tx.grid, k.ch, 5);
    const auto est = estimate_channel_ls(k.rx, k.tx.pilots);
    for (const auto& re : k.layout->data_res) {
        if (re.subcarrier == 0 || re.subcarrier == s.n_subcarriers() - 1) continue;
        for (int r = 0; r < s.n_rx; ++r)
            ASSERT_NEAR(std::abs(est.h_hat.at(re.subcarrier, re.symbol, r) - k.ch.h.at(re.subcarrier, re.symbol, r)),
                        0.0, 1e-12);
    }
}

TEST(RxChain, NoiseVarianceEstimate) {
    SlotConfig s;
    double sum = 0.0;
    const int slots = 200;
    for (int i = 0; i < slots; ++i) {
        Link k = flat_link(s, Complex(0.8, 0.6), 0.1, derive_seed(6, {static_cast<std::uint64_t>(i)}));
        sum += estimate_channel_ls(k.rx, k.tx.pilots).noise_var_hat;
    }
    EXPECT_GE(sum / slots, 0.08);
    EXPECT_LE(sum / slots, 0.12);
}

TEST(RxChain, EstimateErrors) {
    SlotConfig s;
    Link k = flat_link(s, 1.0, 0.0, 7);
    ResourceGrid wrong(12, 14, 2);
    EXPECT_THROW(estimate_channel_ls(wrong, k.tx.pilots), ArgumentError);
    EXPECT_THROW(parse_time_interpolation("spline"), ConfigError);
    EXPECT_EQ(parse_time_interpolation(to_string(TimeInterpolation::Average)), TimeInterpolation::Average);
}

TEST(RxChain, AverageInterpolationIsConstantInTime) {
    SlotConfig s;
    Link k = make_link(s, tdl_c(), 500.0, 20.0, 8);
    const auto est = estimate_channel_ls(k.rx, k.tx.pilots, TimeInterpolation::Average);
    for (int sc = 0; sc < s.n_subcarriers(); sc += 11)
        for (int l = 1; l < s.n_symbols; ++l) ASSERT_EQ(est.h_hat.at(sc, l, 1), est.h_hat.at(sc, 0, 1));
}

TEST(RxChain, LlrCalibrationUpperBound) {
    SlotConfig s;
    s.modulation = Modulation::Qpsk;
    const std::vector<double> edges{0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0};
    std::vector<double> n(edges.size(), 0.0), err(edges.size(), 0.0);
    for (int i = 0; i < 30; ++i) {
        Link k = flat_link(s, 1.0, SnrSpec{0.0}.noise_var(), derive_seed(9, {static_cast<std::uint64_t>(i)}));
        const auto r0 = receive_r0(k.rx, k.ch, *k.layout);
        for (std::size_t j = 0; j < r0.size(); ++j) {
            const double a = std::abs(r0[j]);
            std::size_t b = edges.size() - 1;
            while (edges[b] > a) --b;
            n[b] += 1.0;
            err[b] += hard_bit(r0[j]) != k.bits[j];
        }
    }
    for (std::size_t b = 0; b < edges.size(); ++b) {
        if (n[b] < 500) continue;
        EXPECT_LE(err[b] / n[b], 1.5 / (1.0 + std::exp(edges[b]))) << "bin " << edges[b];
    }
}

TEST(RxChain, ClipAndVanishingSinr) {
    SlotConfig s;
    Link hi = flat_link(s, 1.0, 1e-6, 10);
    const auto r0 = receive_r0(hi.rx, hi.ch, *hi.layout);
    EXPECT_LE(r0.max_abs(), kLlrClip);
    EXPECT_EQ(r0.max_abs(), kLlrClip);
    Link lo = flat_link(s, 1.0, 1e6, 11);
    const auto quiet = receive_r0(lo.rx, lo.ch, *lo.layout);
    EXPECT_LT(quiet.max_abs(), 0.05);
}

TEST(RxChain, HighDopplerR1WorseThanR0) {
    SlotConfig s;
    for (double snr : {0.0, 10.0, 20.0}) {
        std::size_t e0 = 0, e1 = 0;
        for (int i = 0; i < 200; ++i) {
            Link k = make_link(s, tdl_c(), 500.0, snr, derive_seed(12, {static_cast<std::uint64_t>(i)}));
            e0 += sign_errors(receive_r0(k.rx, k.ch, *k.layout), k.bits);
            e1 += sign_errors(receive_r1(k.rx, k.tx.pilots), k.bits);
        }
        EXPECT_GT(e1, e0) << snr << " dB";
    }
}

TEST(RxChain, MorePilotsTrackDopplerBetter) {
    std::size_t e[3] = {0, 0, 0};
    for (int addpos : {0, 2}) {
        SlotConfig s;
        s.dmrs.additional_positions = addpos;
        for (int i = 0; i < 100; ++i) {
            Link k = make_link(s, tdl_c(), 500.0, 15.0, derive_seed(13, {static_cast<std::uint64_t>(i)}));
            e[addpos] += sign_errors(receive_r1(k.rx, k.tx.pilots), k.bits);
        }
        e[addpos] = e[addpos] * 1000 / make_slot_layout(s)->n_coded_bits();
    }
    EXPECT_LE(e[2], e[0]);
}

TEST(RxChain, BaselineR0Regression) {
    const BenchConfig cfg = load_bench_config(default_config_path());
    const BenchResources res = load_resources(cfg);
    SweepConfig sw = cfg.sweep;
    sw.snr_db = {6.0};
    sw.slots_per_point = 200;
    const SlotSimulator sim(cfg, res, cfg.scenario(1), sw);
    auto count = [&] {
        std::size_t errors = 0;
        for (std::size_t k = 0; k < sw.slots_per_point; ++k) {
            const auto a = sim.generate(0, k);
            errors += sign_errors(receive_r0(a.rx, a.channel, sim.layout()), a.coded_bits);
        }
        return errors;
    };
    const std::size_t first = count();
    EXPECT_EQ(first, count());
    EXPECT_EQ(first, kBaselineR0Errors6dB);
}

TEST(RxChain, AverageModelErrorTracksTimeVariation) {
    SlotConfig s;
    Link still = flat_link(s, Complex(0.6, 0.8), 0.0, 14);
    const auto flat = estimate_channel_ls(still.rx, still.tx.pilots, TimeInterpolation::Average);
    ASSERT_EQ(flat.model_error_var.size(), static_cast<std::size_t>(s.n_subcarriers() * s.n_symbols));
    for (double e : flat.model_error_var) ASSERT_NEAR(e, 0.0, 1e-28);
    EXPECT_TRUE(estimate_channel_ls(still.rx, still.tx.pilots).model_error_var.empty());

    Link fast = make_link(s, tdl_c(), 500.0, 30.0, 15);
    const auto est = estimate_channel_ls(fast.rx, fast.tx.pilots, TimeInterpolation::Average);
    double near = 0.0, far = 0.0;
    for (int k = 0; k < s.n_subcarriers(); ++k) {
        near += est.model_error_var[static_cast<std::size_t>(k) * s.n_symbols + 6];
        far += est.model_error_var[static_cast<std::size_t>(k) * s.n_symbols + 13];
    }
    EXPECT_GT(far, near);
    EXPECT_GT(far / s.n_subcarriers(), est.noise_var_hat);

    // Sign decisions are untouched; magnitudes shrink where the model is poor.
    auto plain = est;
    plain.model_error_var.clear();
    const auto a = mmse_equalize(fast.rx, est, fast.layout->data_res);
    const auto b = mmse_equalize(fast.rx, plain, fast.layout->data_res);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_LE(a[i].post_sinr, b[i].post_sinr);
    plain.model_error_var.resize(3);
    EXPECT_THROW(mmse_equalize(fast.rx, plain, fast.layout->data_res), ArgumentError);
}
