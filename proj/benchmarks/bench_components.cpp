// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <memory>
#include <variant>

#include "drsim/bench.hpp"
#include "drsim/rxchain.hpp"

namespace drsim {
namespace {

/// One fixed baseline slot at 10 dB, built once.
struct Fixture {
    BenchConfig cfg = load_bench_config(default_config_path());
    BenchResources res = load_resources(cfg);
    Scenario scenario = cfg.scenario(1);
    SweepConfig sweep = [this] {
        SweepConfig s = cfg.sweep;
        s.snr_db = {10.0};
        s.slots_per_point = 1;
        return s;
    }();
    SlotSimulator sim{cfg, res, scenario, sweep};
    SlotSimulator::SlotArtifacts a = sim.generate(0, 0);
    MagnitudeProfile profile = sim.profile_for(0);
    LlrVector l1 = receive_r1(a.rx, a.tx.pilots, scenario.r1_time_interpolation);
    LlrVector l3 = [this] {
        const ReceiverOutput o =
            receive_r3({a.rx, a.channel, a.coded_bits, sim.layout(), a.surrogate_seed, profile_ptr()},
                       scenario.surrogate_mode);
        return std::holds_alternative<LlrVector>(o) ? std::get<LlrVector>(o) : l1.relabeled(StreamId::R3);
    }();

    const MagnitudeProfile* profile_ptr() const { return profile.empty() ? nullptr : &profile; }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

void BM_GenerateSlot(benchmark::State& st) {
    auto& f = fixture();
    std::size_t i = 0;
    for (auto _ : st) benchmark::DoNotOptimize(f.sim.generate(0, i++));
}
BENCHMARK(BM_GenerateSlot)->Unit(benchmark::kMillisecond);

void BM_R0Chain(benchmark::State& st) {
    auto& f = fixture();
    for (auto _ : st) benchmark::DoNotOptimize(receive_r0(f.a.rx, f.a.channel, f.sim.layout()));
}
BENCHMARK(BM_R0Chain)->Unit(benchmark::kMillisecond);

void BM_R1Chain(benchmark::State& st) {
    auto& f = fixture();
    for (auto _ : st)
        benchmark::DoNotOptimize(receive_r1(f.a.rx, f.a.tx.pilots, f.scenario.r1_time_interpolation));
}
BENCHMARK(BM_R1Chain)->Unit(benchmark::kMillisecond);

void BM_R3Surrogate(benchmark::State& st) {
    auto& f = fixture();
    for (auto _ : st)
        benchmark::DoNotOptimize(receive_r3(
            {f.a.rx, f.a.channel, f.a.coded_bits, f.sim.layout(), f.a.surrogate_seed, f.profile_ptr()},
            f.scenario.surrogate_mode));
}
BENCHMARK(BM_R3Surrogate)->Unit(benchmark::kMillisecond);

void BM_DetectHard(benchmark::State& st) {
    auto& f = fixture();
    for (auto _ : st) benchmark::DoNotOptimize(detect_hard(f.l1, f.l3, f.cfg.sweep.detector));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * f.l1.size()));
}
BENCHMARK(BM_DetectHard)->Unit(benchmark::kMicrosecond);

void BM_DetectConfidence(benchmark::State& st) {
    auto& f = fixture();
    for (auto _ : st) benchmark::DoNotOptimize(detect_confidence(f.l1, f.l3, f.cfg.sweep.detector));
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * f.l1.size()));
}
BENCHMARK(BM_DetectConfidence)->Unit(benchmark::kMicrosecond);

void BM_Combine(benchmark::State& st) {
    auto& f = fixture();
    const ReceiverOutput o3 = f.l3;
    for (auto _ : st) benchmark::DoNotOptimize(combine(f.l1, o3, DecisionRule::Hard, f.cfg.sweep.detector));
}
BENCHMARK(BM_Combine)->Unit(benchmark::kMicrosecond);

void BM_LdpcDecode(benchmark::State& st) {
    auto& f = fixture();
    for (auto _ : st) benchmark::DoNotOptimize(f.sim.code().decode(f.l1.values()));
}
BENCHMARK(BM_LdpcDecode)->Unit(benchmark::kMillisecond);

void BM_LdpcEncode(benchmark::State& st) {
    auto& f = fixture();
    std::vector<Bit> info(f.sim.code().k(), 0);
    for (std::size_t i = 0; i < info.size(); i += 3) info[i] = 1;
    for (auto _ : st) benchmark::DoNotOptimize(f.sim.code().encode(info));
}
BENCHMARK(BM_LdpcEncode)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace drsim

BENCHMARK_MAIN();
