// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "drsim/channel.hpp"
#include "drsim/scenario.hpp"
#include "drsim/seed.hpp"

using namespace drsim;

namespace {

TdlProfile two_taps(double tau) {
    TdlProfile p;
    p.name = "TWO";
    p.taps = {{0.0, 0.0, false}, {tau, 0.0, false}};
    return p;
}

TdlProfile flat() {
    TdlProfile p;
    p.name = "FLAT";
    p.taps = {{0.0, 0.0, false}};
    return p;
}

const std::map<std::string, TdlProfile>& table() {
    static const auto t = load_tap_table((default_data_dir() / "tdl_profiles.txt").string());
    return t;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

ChannelRealization unit_channel(const SlotConfig& s, double noise_var) {
    ChannelRealization ch;
    ch.h = ResourceGrid(s.n_subcarriers(), s.n_symbols, s.n_rx);
    for (auto& v : ch.h.samples()) v = 1.0;
    ch.noise_var = noise_var;
    return ch;
}

}  // namespace

TEST(Channel, NormalizeSumsToOneAndSorts) {
    TdlProfile p;
    p.taps = {{200e-9, -3.0, false}, {0.0, 0.0, false}, {50e-9, -6.0, false}};
    const TdlProfile n = p.normalize();
    double sum = 0.0;
    for (const auto& t : n.taps) sum += std::pow(10.0, t.power_db / 10.0);
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_TRUE(n.normalized);
    for (std::size_t i = 1; i < n.taps.size(); ++i) EXPECT_LE(n.taps[i - 1].delay_s, n.taps[i].delay_s);
}

TEST(Channel, BundledTableParses) {
    for (const char* name : {"DEFAULT-5TAP", "TDL-B", "TDL-C", "TDL-D", "TDL-E"}) {
        ASSERT_TRUE(table().count(name)) << name;
        EXPECT_FALSE(table().at(name).taps.empty());
    }
    EXPECT_TRUE(table().at("TDL-D").taps.front().line_of_sight);
}

TEST(Channel, TapTableErrors) {
    EXPECT_THROW(parse_tap_table("0 0 0\n"), ParseError);
    EXPECT_THROW(parse_tap_table("[A]\n0 0\n"), ParseError);
    EXPECT_THROW(parse_tap_table("[A]\n0 0 2\n"), ParseError);
    EXPECT_THROW(parse_tap_table("[A]\n0 0 0\n[A]\n1 0 0\n"), ParseError);
    EXPECT_THROW(parse_tap_table("[A]\n"), ParseError);
    try {
        parse_tap_table("# c\n[A]\n0 0 0 9\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Channel, ScaleDelaySpreadExamples) {
    TdlProfile p = two_taps(200e-9);
    ASSERT_NEAR(p.rms_delay_spread(), 100e-9, 1e-18);
    const TdlProfile s = scale_delay_spread(p, 300e-9);
    for (std::size_t i = 0; i < p.taps.size(); ++i) {
        EXPECT_NEAR(s.taps[i].delay_s, 3.0 * p.taps[i].delay_s, 1e-21);
        EXPECT_EQ(s.taps[i].power_db, p.taps[i].power_db);
    }
    EXPECT_THROW(scale_delay_spread(p, 0.0), ArgumentError);
    EXPECT_THROW(scale_delay_spread(flat(), 30e-9), ArgumentError);
    const TdlProfile def = table().at("DEFAULT-5TAP").normalize();
    for (double target : {30e-9, 100e-9, 300e-9, 1000e-9})
        EXPECT_NEAR(scale_delay_spread(def, target).rms_delay_spread(), target, 1e-9 * 1e-6);
}

TEST(Channel, Errors) {
    SlotConfig s;
    EXPECT_THROW(realize_channel(TdlProfile{}, 0.0, 5.0, s, 1), ConfigError);
    EXPECT_THROW(realize_channel(flat(), 0.0, -1.0, s, 1), ArgumentError);
    ResourceGrid two(s.n_subcarriers(), s.n_symbols, 2);
    auto ch = realize_channel(flat(), 0.0, 0.0, s, 1);
    EXPECT_THROW(apply_channel(two, ch, 1), ArgumentError);
    ResourceGrid small(12, s.n_symbols, 1);
    EXPECT_THROW(apply_channel(small, ch, 1), ArgumentError);
}

TEST(Channel, FlatStaticTap) {
    SlotConfig s;
    double power = 0.0, below = 0.0;
    const int seeds = 2000;
    for (int seed = 0; seed < seeds; ++seed) {
        auto ch = realize_channel(flat(), 0.0, 0.0, s, derive_seed(11, {static_cast<std::uint64_t>(seed)}));
        for (int r = 0; r < s.n_rx; ++r) {
            const Complex h0 = ch.h.at(0, 0, r);
            for (int k = 0; k < s.n_subcarriers(); k += 37)
                for (int l = 0; l < s.n_symbols; ++l) ASSERT_EQ(ch.h.at(k, l, r), h0);
            power += std::norm(h0);
            below += std::norm(h0) < std::log(2.0);
        }
    }
    // Rayleigh amplitude: |h|^2 ~ Exp(1), median ln 2.
    EXPECT_NEAR(power / (2.0 * seeds), 1.0, 0.05);
    EXPECT_NEAR(below / (2.0 * seeds), 0.5, 0.03);
}

TEST(Channel, ZeroDopplerFreezesTime) {
    SlotConfig s;
    auto ch = realize_channel(table().at("TDL-C"), 300e-9, 0.0, s, 3);
    bool varies = false;
    for (int k = 0; k < s.n_subcarriers(); ++k)
        for (int r = 0; r < s.n_rx; ++r) {
            for (int l = 1; l < s.n_symbols; ++l) ASSERT_EQ(ch.h.at(k, l, r), ch.h.at(k, 0, r));
            varies = varies || std::abs(ch.h.at(k, 0, r) - ch.h.at(0, 0, r)) > 1e-3;
        }
    EXPECT_TRUE(varies);
}

TEST(Channel, TwoRayFrequencyResponse) {
    SlotConfig s;
    ChannelOptions opts;
    const int period = 24;
    const double tau = 1.0 / (period * opts.subcarrier_spacing_hz);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto ch = realize_channel(two_taps(tau), 0.0, 0.0, s, seed, opts);
        const int n = s.n_subcarriers();
        auto phase = [&](int k) {
            const double f = (k - n / 2) * opts.subcarrier_spacing_hz;
            return std::polar(1.0, -2.0 * std::numbers::pi * f * tau);
        };
        for (int r = 0; r < s.n_rx; ++r) {
            // Solve for the two tap gains from subcarriers 0 and 6, then predict all others.
            const Complex h0 = ch.h.at(0, 0, r), h6 = ch.h.at(6, 0, r);
            const Complex g1 = (h0 - h6) / (phase(0) - phase(6));
            const Complex g0 = h0 - g1 * phase(0);
            int null_k = 0;
            double null_v = 1e9;
            for (int k = 0; k < n; ++k) {
                const Complex pred = g0 + g1 * phase(k);
                EXPECT_NEAR(std::abs(ch.h.at(k, 0, r) - pred), 0.0, 1e-9);
                if (k < period && std::norm(pred) < null_v) {
                    null_v = std::norm(pred);
                    null_k = k;
                }
            }
            // Nulls repeat every 1 / tau in frequency.
            for (int k = null_k; k + period < n; k += period)
                EXPECT_NEAR(std::norm(ch.h.at(k + period, 0, r)), std::norm(ch.h.at(k, 0, r)), 1e-9);
        }
    }
}

TEST(Channel, EnergyNormalization) {
    SlotConfig s;
    s.n_prb = 4;
    for (const char* name : {"TDL-C", "TDL-D", "DEFAULT-5TAP"}) {
        std::vector<double> power(s.n_rx, 0.0);
        const int seeds = 1000;
        for (int seed = 0; seed < seeds; ++seed) {
            auto ch = realize_channel(table().at(name), 300e-9, 50.0, s,
                                      derive_seed(12, {static_cast<std::uint64_t>(seed)}));
            for (int k = 0; k < s.n_subcarriers(); ++k)
                for (int l = 0; l < s.n_symbols; ++l)
                    for (int r = 0; r < s.n_rx; ++r) power[r] += std::norm(ch.h.at(k, l, r));
        }
        for (double p : power) {
            const double mean = p / (seeds * s.n_subcarriers() * s.n_symbols);
            EXPECT_GE(mean, 0.95) << name;
            EXPECT_LE(mean, 1.05) << name;
        }
    }
}

TEST(Channel, HighDopplerCorrelationDecays) {
    SlotConfig s;
    s.n_prb = 2;
    std::vector<double> corr(s.n_symbols, 0.0);
    double p0 = 0.0;
    for (int seed = 0; seed < 1000; ++seed) {
        auto ch = realize_channel(flat(), 0.0, 500.0, s, derive_seed(13, {static_cast<std::uint64_t>(seed)}));
        for (int r = 0; r < s.n_rx; ++r) {
            const Complex h0 = ch.h.at(0, 0, r);
            p0 += std::norm(h0);
            for (int l = 0; l < s.n_symbols; ++l) corr[l] += std::real(ch.h.at(0, l, r) * std::conj(h0));
        }
    }
    ChannelOptions opts;
    for (int l = 1; l < s.n_symbols; ++l) {
        EXPECT_LT(corr[l], corr[l - 1]) << "lag " << l;
        const double jakes = std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * 500.0 * l * opts.symbol_duration_s);
        EXPECT_NEAR(corr[l] / p0, jakes, 0.06) << "lag " << l;
    }
}

TEST(Channel, AntennasIndependent) {
    SlotConfig s;
    s.n_prb = 1;
    Complex cross{0.0, 0.0};
    double p = 0.0;
    const int seeds = 4000;
    for (int seed = 0; seed < seeds; ++seed) {
        auto ch = realize_channel(flat(), 0.0, 5.0, s, derive_seed(14, {static_cast<std::uint64_t>(seed)}));
        cross += ch.h.at(0, 0, 0) * std::conj(ch.h.at(0, 0, 1));
        p += std::norm(ch.h.at(0, 0, 0));
    }
    EXPECT_LT(std::abs(cross) / p, 4.0 / std::sqrt(static_cast<double>(seeds)));
}

TEST(Channel, NoiselessIsExactlyMultiplicative) {
    SlotConfig s;
    auto ch = realize_channel(table().at("TDL-C"), 300e-9, 5.0, s, 4);
    ch.noise_var = 0.0;
    ResourceGrid tx(s.n_subcarriers(), s.n_symbols, 1);
    Rng rng(5);
    for (auto& v : tx.samples()) v = Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
    const ResourceGrid y = apply_channel(tx, ch, 6);
    for (int k = 0; k < s.n_subcarriers(); ++k)
        for (int l = 0; l < s.n_symbols; ++l)
            for (int r = 0; r < s.n_rx; ++r) ASSERT_EQ(y.at(k, l, r), ch.h.at(k, l, r) * tx.at(k, l, 0));
}

TEST(Channel, NoiseVarianceAndDeterminism) {
    SlotConfig s;
    const double sigma2 = SnrSpec{10.0}.noise_var();
    EXPECT_NEAR(sigma2, 0.1, 1e-15);
    auto ch = unit_channel(s, sigma2);
    const ResourceGrid zero(s.n_subcarriers(), s.n_symbols, 1);
    const ResourceGrid y = apply_channel(zero, ch, 7);
    double p = 0.0;
    for (auto v : y.samples()) p += std::norm(v);
    const double n = static_cast<double>(y.samples().size());
    EXPECT_EQ(n, 312.0 * 14.0 * 2.0);
    EXPECT_NEAR(p / n, sigma2, 4.0 * sigma2 / std::sqrt(n));
    const ResourceGrid again = apply_channel(zero, ch, 7);
    EXPECT_TRUE(std::equal(y.samples().begin(), y.samples().end(), again.samples().begin()));
}

// Unit-energy QPSK over complex noise of total variance N0 has bit error
// rate Q(sqrt(2 Eb/N0)) = Q(sqrt(Es/N0)).
TEST(Channel, QpskQFunctionOracle) {
    SlotConfig s;
    s.modulation = Modulation::Qpsk;
    s.n_rx = 1;
    const auto layout = make_slot_layout(s);
    for (double es_n0_db : {4.0, 4.0 + 10.0 * std::log10(2.0), 8.0}) {
        std::size_t errors = 0, bits = 0;
        for (std::uint64_t trial = 0; trial < 25; ++trial) {
            Rng rng(derive_seed(15, {trial}));
            std::vector<Bit> coded(layout->n_coded_bits());
            for (auto& b : coded) b = static_cast<Bit>(rng() & 1u);
            const TxSlot tx = assemble_tx_grid(coded, layout, trial);
            const ResourceGrid rx = apply_channel(tx.grid, unit_channel(s, SnrSpec{es_n0_db}.noise_var()),
                                                  derive_seed(15, {trial, 1}));
            std::vector<Complex> sym;
            for (const auto& re : layout->data_res) sym.push_back(rx.at(re.subcarrier, re.symbol, 0));
            const auto hard = qam_hard_demap(sym, Modulation::Qpsk);
            for (std::size_t j = 0; j < coded.size(); ++j) errors += hard[j] != coded[j];
            bits += coded.size();
        }
        const double p = q_function(std::sqrt(std::pow(10.0, es_n0_db / 10.0)));
        const double ber = static_cast<double>(errors) / static_cast<double>(bits);
        EXPECT_NEAR(ber, p, 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(bits))) << es_n0_db << " dB";
    }
    // At Eb/N0 = 4 dB the oracle is the familiar 0.0125.
    EXPECT_NEAR(q_function(std::sqrt(2.0 * std::pow(10.0, 0.4))), 0.0125, 5e-5);
}
