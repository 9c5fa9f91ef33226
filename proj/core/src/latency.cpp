// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/latency.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>

#include "drsim/rxchain.hpp"

namespace drsim {

void LatencyConfig::validate() const {
    if (reps < 1) throw ConfigError("latency reps must be >= 1");
}

ComponentStats summarize(const std::string& name, std::span<const double> samples_ms) {
    if (samples_ms.empty()) throw ArgumentError("no latency samples for " + name);
    ComponentStats c;
    c.name = name;
    c.samples = samples_ms.size();
    const double n = static_cast<double>(c.samples);
    c.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / n;
    std::vector<double> s(samples_ms.begin(), samples_ms.end());
    std::sort(s.begin(), s.end());
    c.median_ms = c.samples % 2 ? s[c.samples / 2] : 0.5 * (s[c.samples / 2 - 1] + s[c.samples / 2]);
    c.min_ms = s.front();
    c.max_ms = s.back();
    if (c.samples > 1) {
        double acc = 0.0;
        for (double v : s) acc += (v - c.mean_ms) * (v - c.mean_ms);
        c.std_ms = std::sqrt(acc / (n - 1.0));
    }
    return c;
}

const ComponentStats& LatencyReport::component(const std::string& name) const {
    for (const auto& c : components)
        if (c.name == name) return c;
    throw ArgumentError("no latency component '" + name + "'");
}

namespace {

volatile double g_sink = 0.0;

ComponentStats time_component(const std::string& name, const LatencyConfig& lc, const std::function<double()>& f) {
    for (std::size_t i = 0; i < lc.warmup; ++i) g_sink = g_sink + f();
    std::vector<double> ms;
    ms.reserve(lc.reps);
    for (std::size_t i = 0; i < lc.reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const double v = f();
        const auto t1 = std::chrono::steady_clock::now();
        g_sink = g_sink + v;
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return summarize(name, ms);
}

}  // namespace

LatencyReport latency_bench(const BenchConfig& cfg, const BenchResources& res, const Scenario& s,
                            const LatencyConfig& lc) {
    lc.validate();
    SweepConfig sweep = cfg.sweep;
    sweep.snr_db = {lc.snr_db};
    sweep.slots_per_point = 1;
    SlotSimulator sim(cfg, res, s, sweep);
    const auto a = sim.generate(0, lc.slot_index);
    const MagnitudeProfile profile = sim.profile_for(0);
    const MagnitudeProfile* pp = profile.empty() ? nullptr : &profile;
    const SlotLayout& layout = sim.layout();
    const LdpcCode& code = sim.code();
    const DetectorConfig det = cfg.sweep.detector;

    auto r3 = [&] {
        return receive_r3({a.rx, a.channel, a.coded_bits, layout, a.surrogate_seed, pp}, s.surrogate_mode);
    };
    const LlrVector l1 = receive_r1(a.rx, a.tx.pilots, s.r1_time_interpolation);
    const ReceiverOutput o3 = r3();
    const LlrVector l3 = std::holds_alternative<LlrVector>(o3) ? std::get<LlrVector>(o3) : l1.relabeled(StreamId::R3);

    LatencyReport rep;
    rep.components.push_back(time_component("r0_chain", lc, [&] { return receive_r0(a.rx, a.channel, layout).values()[0]; }));
    rep.components.push_back(time_component(
        "r1_chain", lc, [&] { return receive_r1(a.rx, a.tx.pilots, s.r1_time_interpolation).values()[0]; }));
    rep.components.push_back(time_component("r3_surrogate", lc, [&] {
        const auto o = r3();
        return std::holds_alternative<LlrVector>(o) ? std::get<LlrVector>(o).values()[0] : 0.0;
    }));
    rep.components.push_back(time_component("detect_hard", lc, [&] { return detect_hard(l1, l3, det).d; }));
    rep.components.push_back(time_component(
        "detect_confidence", lc, [&] { return detect_confidence(l1, l3, det).confidence_fraction.value_or(0.0); }));
    rep.components.push_back(
        time_component("ldpc_decode", lc, [&] { return static_cast<double>(code.decode(l1.values()).iterations); }));
    rep.components.push_back(time_component("r5_pipeline", lc, [&] {
        const LlrVector p1 = receive_r1(a.rx, a.tx.pilots, s.r1_time_interpolation);
        const ReceiverOutput p3 = r3();
        double acc = 0.0;
        const LlrVector* chosen = &p1;
        if (const auto* v3 = std::get_if<LlrVector>(&p3)) {
            const SlotDecision dh = detect_hard(p1, *v3, det);
            acc += dh.d + detect_confidence(p1, *v3, det).confidence_fraction.value_or(0.0);
            if (dh.trusted()) chosen = v3;
        }
        acc += static_cast<double>(code.decode(chosen->values()).iterations);
        return acc;
    }));
    const double det_ms = rep.component("detect_hard").mean_ms + rep.component("detect_confidence").mean_ms;
    const double pipe_ms = rep.component("r5_pipeline").mean_ms;
    rep.detector_fraction = pipe_ms > 0.0 ? det_ms / pipe_ms : 0.0;
    return rep;
}

}  // namespace drsim
