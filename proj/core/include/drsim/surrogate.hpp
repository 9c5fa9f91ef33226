// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Stand-in for the neural receiver R3. It has the same receive interface as
// the classical chains but produces its LLRs from the true channel and, for
// the silent-failure mode, the true coded bits. That genie knowledge stays
// inside this module; detectors only ever see the resulting LlrVector.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "drsim/arbiter.hpp"
#include "drsim/channel.hpp"
#include "drsim/grid.hpp"

namespace drsim {

/// Perfect-CSI chain run on a copy of the grid with extra white noise of
/// variance alpha * sigma^2, i.e. an SNR penalty of 10 log10(1 + alpha) dB.
struct GenieBoost {
    double alpha = 0.15;
};

enum class MagnitudeSource { Slot, Profile };

/// Correct-sign LLRs with genie-chain magnitudes, and a seeded subset of
/// exactly round(p_wrong * N) bits given the wrong sign. The subset is drawn
/// from the bits whose magnitude rank lies in the top confident_fraction, so
/// the wrong bits are confident ones. With MagnitudeSource::Profile the
/// magnitudes are replaced rank-for-rank by the in-distribution quantiles.
struct SilentFailure {
    double p_wrong = 0.07;
    MagnitudeSource source = MagnitudeSource::Profile;
    double genie_alpha = 0.15;
    double confident_fraction = 0.5;
};

/// scale * genie LLR + extra_noise * N(0, 1).
struct Miscalibrated {
    double scale = 0.5;
    double extra_noise = 0.5;
};

struct HardFailureMode {};

using SurrogateMode = std::variant<GenieBoost, SilentFailure, Miscalibrated, HardFailureMode>;

void validate(const SurrogateMode& mode);
std::string describe(const SurrogateMode& mode);

/// Empirical |LLR| distribution stored as an equally spaced quantile table.
class MagnitudeProfile {
public:
    MagnitudeProfile() = default;
    static MagnitudeProfile from_samples(std::vector<double> magnitudes, std::size_t n_quantiles = 1025);

    bool empty() const { return q_.empty(); }
    std::span<const double> quantiles() const { return q_; }
    /// Linear interpolation between table entries, u in [0, 1].
    double quantile(double u) const;
    /// Fraction of the profile mass below x.
    double cdf(double x) const;

private:
    std::vector<double> q_;
};

/// The operating point a magnitude profile is computed for.
struct ProfilePoint {
    std::shared_ptr<const SlotLayout> layout;
    TdlProfile channel;
    double delay_spread_s = 0.0;
    double doppler_hz = 0.0;
    ChannelOptions channel_options{};
    double snr_db = 0.0;
};

/// Genie-chain |LLR| samples over n_slots independent slots (random bits, no
/// coding), summarized as a quantile table.
MagnitudeProfile in_distribution_magnitude_profile(const ProfilePoint& point, double alpha, std::size_t n_slots,
                                                   std::uint64_t seed);

struct SurrogateInput {
    const ResourceGrid& rx;
    const ChannelRealization& true_channel;
    std::span<const Bit> true_bits;
    const SlotLayout& layout;
    std::uint64_t seed;
    /// Used by SilentFailure with MagnitudeSource::Profile; when null the
    /// slot's own genie magnitudes are kept.
    const MagnitudeProfile* profile = nullptr;
};

ReceiverOutput receive_r3(const SurrogateInput& in, const SurrogateMode& mode);

/// Genie LLRs on the grid as seen with the alpha noise penalty.
std::vector<double> genie_llrs(const ResourceGrid& rx, const ChannelRealization& ch, const SlotLayout& layout,
                               double alpha, std::uint64_t seed);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Selection axes a policy rule can match on.
struct ScenarioAxes {
    std::string channel;
    double doppler_hz = 5.0;
    double delay_spread_s = 300e-9;
    Modulation modulation = Modulation::Qam16;
    int dmrs_additional_positions = 1;
};

struct PolicyRule {
    std::optional<Modulation> modulation;
    std::optional<int> dmrs_additional_positions;
    std::optional<double> min_doppler_hz;
    std::optional<std::string> channel;
    SurrogateMode mode;

    bool matches(const ScenarioAxes& s) const;
};

/// Ordered rules, first match wins, with a mandatory fallback so every
/// scenario maps to exactly one mode.
struct SurrogatePolicy {
    std::vector<PolicyRule> rules;
    SurrogateMode fallback = GenieBoost{0.15};

    SurrogateMode select(const ScenarioAxes& s) const;
    static SurrogatePolicy defaults();
};

}  // namespace drsim
