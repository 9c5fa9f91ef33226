// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/props.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "drsim/bench.hpp"
#include "drsim/rxchain.hpp"
#include "drsim/seed.hpp"

namespace drsim {

namespace {

constexpr DecisionRule kRules[] = {DecisionRule::Hard, DecisionRule::Confidence, DecisionRule::Disjunctive,
                                   DecisionRule::Conjunctive};

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Bit> random_bits(Rng& rng, std::size_t n) {
    std::vector<Bit> b(n);
    for (Bit& x : b) x = static_cast<Bit>(rng() >> 63);
    return b;
}

// Noisy LLRs for known bits: mean +/- mu, unit-scale Gaussian spread, clipped.
std::vector<double> noisy_llrs(Rng& rng, std::span<const Bit> bits, double mu, double spread) {
    std::normal_distribution<double> g(0.0, spread);
    std::vector<double> v(bits.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::clamp((bits[i] ? -mu : mu) + g(rng), -kLlrClip, kLlrClip);
    return v;
}

ReceiverOutput synthetic_l3(Rng& rng, const std::vector<double>& l1, std::span<const Bit> bits) {
    std::uniform_int_distribution<int> kind(0, 6);
    std::vector<double> v = l1;
    switch (kind(rng)) {
        case 0: break;
        case 1: v = noisy_llrs(rng, bits, 4.0 * uniform01(rng), 0.5 + 3.0 * uniform01(rng)); break;
        case 2: {
            const double p = 0.3 * uniform01(rng);
            for (double& x : v)
                if (uniform01(rng) < p) x = -x;
            break;
        }
        case 3: {
            const double s = 0.01 + 10.0 * uniform01(rng);
            for (double& x : v) x = std::clamp(s * x, -kLlrClip, kLlrClip);
            break;
        }
        case 4:
            for (double& x : v)
                if (uniform01(rng) < 0.5) x = 0.0;
            break;
        case 5: return HardFailure{"synthetic"};
        default:
            for (double& x : v) x = -x;
            break;
    }
    return LlrVector(std::move(v), StreamId::R3);
}

DetectorConfig random_detector(Rng& rng) {
    static constexpr double taus[] = {0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
    DetectorConfig d;
    d.tau = uniform01(rng) < 0.5 ? taus[rng() % 7] : uniform01(rng);
    d.vote_threshold = uniform01(rng) < 0.5 ? 0.5 : 0.99 * uniform01(rng);
    return d;
}

std::size_t check_all_rules(const Combiner& combiner, const LlrVector& l1, const ReceiverOutput& l3,
                            const DetectorConfig& det, std::size_t& checks) {
    std::size_t bad = 0;
    for (DecisionRule rule : kRules) {
        ++checks;
        bool ok = false;
        try {
            ok = check_bounded_output(l1, l3, combiner(l1, l3, rule, det).output);
        } catch (const std::exception&) {
            ok = false;
        }
        if (!ok) ++bad;
    }
    return bad;
}

Scenario with_mode(Scenario s, Modulation m, SurrogateMode mode) {
    s.modulation = m;
    s.surrogate_mode = mode;
    return s;
}

}  // namespace

PropReport prop1_suite(const Prop1Config& pc, const Combiner& combiner, const BenchConfig* cfg,
                       const BenchResources* res) {
    const auto t0 = std::chrono::steady_clock::now();
    PropReport rep;
    rep.name = "proposition-1 bounded output";
    Rng rng(derive_seed(pc.seed, {0x9101}));
    std::uniform_int_distribution<std::size_t> len(64, 2048);
    for (std::size_t s = 0; s < pc.synthetic_slots; ++s) {
        const std::size_t n = len(rng);
        const auto bits = random_bits(rng, n);
        const LlrVector l1(noisy_llrs(rng, bits, 4.0 * uniform01(rng), 0.5 + 3.0 * uniform01(rng)), StreamId::R1);
        const ReceiverOutput l3 = synthetic_l3(rng, std::vector<double>(l1.values().begin(), l1.values().end()), bits);
        rep.violations += check_all_rules(combiner, l1, l3, random_detector(rng), rep.checks);
        ++rep.slots;
    }
    if (cfg && res && pc.real_slots > 0) {
        std::vector<Scenario> regimes;
        for (int id : {13, 10, 1})
            for (const auto& sc : cfg->scenarios)
                if (sc.id == id) regimes.push_back(sc);
        if (!regimes.empty())
            regimes.push_back(with_mode(regimes.back(), Modulation::Qam64, HardFailureMode{}));
        SweepConfig sweep = cfg->sweep;
        sweep.snr_db = {4.0, 10.0, 16.0};
        sweep.base_seed = pc.seed;
        for (std::size_t k = 0; k < pc.real_slots && !regimes.empty(); ++k) {
            const Scenario& sc = regimes[k % regimes.size()];
            const std::size_t si = (k / regimes.size()) % sweep.snr_db.size();
            SlotSimulator sim(*cfg, *res, sc, sweep, combiner);
            const auto a = sim.generate(si, k);
            const MagnitudeProfile prof = sim.profile_for(si);
            const LlrVector l1 = receive_r1(a.rx, a.tx.pilots, sc.r1_time_interpolation);
            const ReceiverOutput l3 = receive_r3(
                {a.rx, a.channel, a.coded_bits, sim.layout(), a.surrogate_seed, prof.empty() ? nullptr : &prof},
                sc.surrogate_mode);
            rep.violations += check_all_rules(combiner, l1, l3, sweep.detector, rep.checks);
            ++rep.slots;
        }
    }
    rep.seconds = elapsed(t0);
    return rep;
}

PropReport prop2_suite(const Prop2Config& pc, const BenchConfig* cfg, const BenchResources* res) {
    pc.pcw.validate();
    const auto t0 = std::chrono::steady_clock::now();
    PropReport rep;
    rep.name = "proposition-2 bounded residual";
    Rng rng(derive_seed(pc.seed, {0x9102}));
    std::uniform_int_distribution<std::size_t> len(64, 2048);
    for (std::size_t s = 0; s < pc.synthetic_slots; ++s) {
        const std::size_t n = len(rng);
        const auto bits = random_bits(rng, n);
        auto v = noisy_llrs(rng, bits, 6.0 * uniform01(rng), 0.5 + 3.0 * uniform01(rng));
        // Confidently wrong injections, some exactly at and just above the budget.
        const double p = 0.2 * uniform01(rng);
        for (std::size_t i = 0; i < n; ++i) {
            if (uniform01(rng) >= p) continue;
            double m;
            switch (rng() % 4) {
                case 0: m = pc.pcw.delta_max; break;
                case 1: m = std::nextafter(pc.pcw.delta_max, kLlrClip); break;
                case 2: m = kLlrClip; break;
                default: m = pc.pcw.delta_max + 5.0 * uniform01(rng); break;
            }
            v[i] = bits[i] ? m : -m;
        }
        const LlrVector l3(std::move(v), StreamId::R3);
        ++rep.checks;
        if (!check_bounded_residual(l3, bits, pc.pcw, pc.trials, rng())) ++rep.violations;
        ++rep.slots;
    }
    if (cfg && res && pc.real_slots > 0) {
        for (const auto& sc : cfg->scenarios) {
            if (!std::holds_alternative<SilentFailure>(sc.surrogate_mode)) continue;
            SweepConfig sweep = cfg->sweep;
            sweep.snr_db = {10.0, 18.0};
            sweep.base_seed = pc.seed;
            SlotSimulator sim(*cfg, *res, sc, sweep);
            for (std::size_t k = 0; k < pc.real_slots; ++k) {
                const std::size_t si = k % sweep.snr_db.size();
                const auto a = sim.generate(si, k);
                const MagnitudeProfile prof = sim.profile_for(si);
                const ReceiverOutput o3 = receive_r3(
                    {a.rx, a.channel, a.coded_bits, sim.layout(), a.surrogate_seed, prof.empty() ? nullptr : &prof},
                    sc.surrogate_mode);
                const auto* l3 = std::get_if<LlrVector>(&o3);
                if (!l3) continue;
                ++rep.checks;
                if (!check_bounded_residual(*l3, a.coded_bits, pc.pcw, pc.trials, rng())) ++rep.violations;
                ++rep.slots;
            }
            break;
        }
    }
    rep.seconds = elapsed(t0);
    return rep;
}

}  // namespace drsim
