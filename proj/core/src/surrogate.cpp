// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "drsim/rxchain.hpp"
#include "drsim/seed.hpp"

namespace drsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double clip(double v) { return std::clamp(v, -kLlrClip, kLlrClip); }

}  // namespace

void validate(const SurrogateMode& mode) {
    std::visit(overloaded{
                   [](const GenieBoost& g) {
                       if (!(g.alpha >= 0.0) || !std::isfinite(g.alpha))
                           throw ConfigError("genie_boost alpha must be >= 0");
                   },
                   [](const SilentFailure& s) {
                       if (!(s.p_wrong >= 0.0 && s.p_wrong <= 1.0))
                           throw ConfigError("silent_failure p_wrong must lie in [0, 1]");
                       if (!(s.genie_alpha >= 0.0) || !std::isfinite(s.genie_alpha))
                           throw ConfigError("silent_failure genie alpha must be >= 0");
                       if (!(s.confident_fraction > 0.0 && s.confident_fraction <= 1.0))
                           throw ConfigError("silent_failure confident fraction must lie in (0, 1]");
                   },
                   [](const Miscalibrated& m) {
                       if (!std::isfinite(m.scale) || !(m.scale > 0.0))
                           throw ConfigError("miscalibrated scale must be > 0");
                       if (!std::isfinite(m.extra_noise) || m.extra_noise < 0.0)
                           throw ConfigError("miscalibrated extra noise must be >= 0");
                   },
                   [](const HardFailureMode&) {},
               },
               mode);
}

std::string describe(const SurrogateMode& mode) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const GenieBoost& g) { os << "genie_boost(alpha=" << g.alpha << ")"; },
                   [&](const SilentFailure& s) {
                       os << "silent_failure(p_wrong=" << s.p_wrong << ", magnitudes="
                          << (s.source == MagnitudeSource::Profile ? "profile" : "slot") << ")";
                   },
                   [&](const Miscalibrated& m) {
                       os << "miscalibrated(scale=" << m.scale << ", noise=" << m.extra_noise << ")";
                   },
                   [&](const HardFailureMode&) { os << "hard_failure"; },
               },
               mode);
    return os.str();
}

MagnitudeProfile MagnitudeProfile::from_samples(std::vector<double> magnitudes, std::size_t n_quantiles) {
    MagnitudeProfile p;
    if (magnitudes.empty()) return p;
    if (n_quantiles < 2) throw ArgumentError("magnitude profile needs at least two quantiles");
    for (double& m : magnitudes) {
        if (!std::isfinite(m)) throw ArgumentError("non-finite magnitude sample");
        m = std::abs(m);
    }
    std::sort(magnitudes.begin(), magnitudes.end());
    p.q_.resize(n_quantiles);
    const double last = static_cast<double>(magnitudes.size() - 1);
    for (std::size_t i = 0; i < n_quantiles; ++i) {
        double pos = last * static_cast<double>(i) / static_cast<double>(n_quantiles - 1);
        auto lo = static_cast<std::size_t>(std::floor(pos));
        auto hi = std::min(lo + 1, magnitudes.size() - 1);
        double f = pos - static_cast<double>(lo);
        p.q_[i] = magnitudes[lo] * (1.0 - f) + magnitudes[hi] * f;
    }
    return p;
}

double MagnitudeProfile::quantile(double u) const {
    if (q_.empty()) throw ArgumentError("empty magnitude profile");
    u = std::clamp(u, 0.0, 1.0);
    double pos = u * static_cast<double>(q_.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, q_.size() - 1);
    double f = pos - static_cast<double>(lo);
    return q_[lo] * (1.0 - f) + q_[hi] * f;
}

double MagnitudeProfile::cdf(double x) const {
    if (q_.empty()) throw ArgumentError("empty magnitude profile");
    if (x < q_.front()) return 0.0;
    if (x >= q_.back()) return 1.0;
    auto it = std::upper_bound(q_.begin(), q_.end(), x);
    auto hi = static_cast<std::size_t>(it - q_.begin());
    auto lo = hi - 1;
    double span = q_[hi] - q_[lo];
    double f = span > 0.0 ? (x - q_[lo]) / span : 1.0;
    return (static_cast<double>(lo) + f) / static_cast<double>(q_.size() - 1);
}

std::vector<double> genie_llrs(const ResourceGrid& rx, const ChannelRealization& ch, const SlotLayout& layout,
                               double alpha, std::uint64_t seed) {
    ChannelEstimate est = perfect_estimate(ch);
    if (alpha <= 0.0 || ch.noise_var <= 0.0) {
        est.noise_var_hat = ch.noise_var;
        return soft_demap_slot(mmse_equalize(rx, est, layout.data_res), layout.config.modulation);
    }
    ResourceGrid noisy = rx;
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(alpha * ch.noise_var / 2.0));
    for (Complex& s : noisy.samples()) s += Complex(gauss(rng), gauss(rng));
    est.noise_var_hat = ch.noise_var * (1.0 + alpha);
    return soft_demap_slot(mmse_equalize(noisy, est, layout.data_res), layout.config.modulation);
}

namespace {

std::vector<double> silent_failure(const SurrogateInput& in, const SilentFailure& mode) {
    const std::size_t n = in.layout.n_coded_bits();
    if (in.true_bits.size() != n) throw ArgumentError("true bit count does not match the slot layout");
    std::vector<double> llr = genie_llrs(in.rx, in.true_channel, in.layout, mode.genie_alpha,
                                         derive_seed(in.seed, {1}));
    if (n == 0) return llr;

    // Ascending magnitude order; ties keep index order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(llr[a]) < std::abs(llr[b]); });
    std::vector<double> mag(n);
    const bool use_profile = mode.source == MagnitudeSource::Profile && in.profile && !in.profile->empty();
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t i = order[r];
        mag[i] = use_profile ? in.profile->quantile((static_cast<double>(r) + 0.5) / static_cast<double>(n))
                             : std::abs(llr[i]);
    }

    auto n_wrong = static_cast<std::size_t>(std::llround(mode.p_wrong * static_cast<double>(n)));
    auto n_pool = static_cast<std::size_t>(std::llround(mode.confident_fraction * static_cast<double>(n)));
    n_pool = std::clamp(n_pool, n_wrong, n);
    // Candidates are the n_pool largest magnitudes.
    std::vector<std::size_t> pool(order.end() - static_cast<std::ptrdiff_t>(n_pool), order.end());
    Rng rng(derive_seed(in.seed, {2}));
    for (std::size_t i = 0; i < n_wrong; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n_pool - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<char> flipped(n, 0);
    for (std::size_t i = 0; i < n_wrong; ++i) flipped[pool[i]] = 1;

    for (std::size_t i = 0; i < n; ++i) {
        bool one = in.true_bits[i] != 0;
        if (flipped[i]) one = !one;
        double m = flipped[i] ? std::max(mag[i], 1e-6) : mag[i];
        llr[i] = one ? -m : m;
    }
    return llr;
}

}  // namespace

ReceiverOutput receive_r3(const SurrogateInput& in, const SurrogateMode& mode) {
    validate(mode);
    return std::visit(
        overloaded{
            [&](const GenieBoost& g) -> ReceiverOutput {
                return LlrVector(genie_llrs(in.rx, in.true_channel, in.layout, g.alpha, in.seed), StreamId::R3);
            },
            [&](const SilentFailure& s) -> ReceiverOutput {
                return LlrVector(silent_failure(in, s), StreamId::R3);
            },
            [&](const Miscalibrated& m) -> ReceiverOutput {
                std::vector<double> llr = genie_llrs(in.rx, in.true_channel, in.layout, 0.0, in.seed);
                Rng rng(derive_seed(in.seed, {3}));
                std::normal_distribution<double> gauss(0.0, 1.0);
                for (double& v : llr) v = clip(m.scale * v + m.extra_noise * gauss(rng));
                return LlrVector(std::move(llr), StreamId::R3);
            },
            [&](const HardFailureMode&) -> ReceiverOutput {
                std::ostringstream os;
                os << "surrogate supports at most 4 bits per symbol, got "
                   << bits_per_symbol(in.layout.config.modulation);
                return HardFailure{os.str()};
            },
        },
        mode);
}

MagnitudeProfile in_distribution_magnitude_profile(const ProfilePoint& point, double alpha, std::size_t n_slots,
                                                   std::uint64_t seed) {
    if (!point.layout) throw ArgumentError("profile point has no slot layout");
    const SlotLayout& layout = *point.layout;
    const std::size_t n = layout.n_coded_bits();
    std::vector<double> mags;
    mags.reserve(n * n_slots);
    SnrSpec snr{point.snr_db};
    for (std::size_t s = 0; s < n_slots; ++s) {
        Rng bit_rng(derive_seed(seed, {s, tag(SeedStream::InfoBits)}));
        std::vector<Bit> bits(n);
        for (Bit& b : bits) b = static_cast<Bit>(bit_rng() >> 63);
        TxSlot tx = assemble_tx_grid(bits, point.layout, derive_seed(seed, {s, tag(SeedStream::Pilots)}));
        ChannelRealization ch = realize_channel(point.channel, point.delay_spread_s, point.doppler_hz, layout.config,
                                                derive_seed(seed, {s, tag(SeedStream::Channel)}),
                                                point.channel_options);
        ch.noise_var = snr.noise_var();
        ResourceGrid rx = apply_channel(tx.grid, ch, derive_seed(seed, {s, tag(SeedStream::Noise)}));
        std::vector<double> llr =
            genie_llrs(rx, ch, layout, alpha, derive_seed(seed, {s, tag(SeedStream::Surrogate)}));
        for (double v : llr) mags.push_back(std::abs(v));
    }
    return MagnitudeProfile::from_samples(std::move(mags));
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ArgumentError("KS statistic needs two non-empty samples");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    while (i < x.size() && j < y.size()) {
        double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

bool PolicyRule::matches(const ScenarioAxes& s) const {
    if (modulation && *modulation != s.modulation) return false;
    if (dmrs_additional_positions && *dmrs_additional_positions != s.dmrs_additional_positions) return false;
    if (min_doppler_hz && s.doppler_hz < *min_doppler_hz) return false;
    if (channel && *channel != s.channel) return false;
    return true;
}

SurrogateMode SurrogatePolicy::select(const ScenarioAxes& s) const {
    for (const auto& r : rules)
        if (r.matches(s)) return r.mode;
    return fallback;
}

SurrogatePolicy SurrogatePolicy::defaults() {
    SurrogatePolicy p;
    PolicyRule qam64;
    qam64.modulation = Modulation::Qam64;
    qam64.mode = HardFailureMode{};
    PolicyRule sparse;
    sparse.dmrs_additional_positions = 2;
    sparse.mode = SilentFailure{};
    PolicyRule fast;
    fast.min_doppler_hz = 200.0;
    fast.mode = GenieBoost{0.05};
    PolicyRule qpsk;
    qpsk.modulation = Modulation::Qpsk;
    qpsk.mode = Miscalibrated{};
    p.rules = {qam64, sparse, fast, qpsk};
    p.fallback = GenieBoost{0.15};
    return p;
}

}  // namespace drsim
