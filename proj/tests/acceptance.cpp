// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance gate. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails. Optional arguments restrict the run to the listed
// criterion numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "drsim/bench.hpp"
#include "drsim/cli.hpp"
#include "drsim/latency.hpp"
#include "drsim/props.hpp"
#include "drsim/results.hpp"
#include "drsim/seed.hpp"

using namespace drsim;

namespace {

// Tolerances, pinned.
constexpr double kOpSnrTolDb = 0.3;
constexpr double kRollbackMin = 0.80;
constexpr double kPcwTarget = 0.07;
constexpr double kPcwTol = 0.005;
constexpr double kPcwDecayRatio = 0.1;
constexpr double kPcwRiseTol = 0.002;
constexpr double kEnsembleAgreement = 0.95;
constexpr double kDetectorFraction = 0.05;
constexpr double kQSigmas = 3.0;
constexpr std::size_t kExpectedBits = 16224;
constexpr double kProp1Seconds = 60.0;
constexpr double kProp2Seconds = 120.0;
constexpr double kRegimeSeconds = 600.0;
constexpr double kTauSweepSeconds = 1200.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

std::string fmt(const OperatingSnr& op) { return format_operating_snr(op); }

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " | " << detail << std::endl;
    if (!ok) ++failures;
}

OperatingSnr op_of(const ScenarioRun& run, StreamId id) {
    return operating_snr(run.bler_curve(id), run.sweep.slots_per_point);
}

bool within(const OperatingSnr& a, const OperatingSnr& b, double tol) {
    return !a.fail() && !b.fail() && std::abs(*a.value_db - *b.value_db) <= tol;
}

/// Fail counts as +infinity.
bool not_worse(const OperatingSnr& a, const OperatingSnr& b) {
    if (b.fail()) return true;
    if (a.fail()) return false;
    return *a.value_db <= *b.value_db;
}

/// Hard-detector rollback rate at one SNR point for an arbitrary tau.
double rollback_at(const ScenarioRun& run, std::size_t si, double tau) {
    const auto& recs = run.records[si];
    std::size_t n = 0;
    for (const auto& r : recs) n += r.trusts(DecisionRule::Hard, tau) ? 0 : 1;
    return static_cast<double>(n) / static_cast<double>(recs.size());
}

/// Criterion-3 recovery on the silent-failure run at a given tau.
bool recovers(const ScenarioRun& sf, const OperatingSnr& r5, double tau, std::string& detail) {
    const OperatingSnr r1 = op_of(sf, StreamId::R1);
    bool ok = within(r5, r1, kOpSnrTolDb);
    double worst = 1.0;
    for (std::size_t si = 0; si < sf.points.size(); ++si)
        if (sf.points[si].snr_db >= 8.0) worst = std::min(worst, rollback_at(sf, si, tau));
    ok = ok && worst > kRollbackMin;
    detail = "R5 " + fmt(r5) + " vs R1 " + fmt(r1) + ", min rollback(>=8 dB) " + fmt(100.0 * worst, 1) + "%";
    return ok;
}

/// R5 captures the high-Doppler gain when it tracks R3's operating SNR.
bool captures(const ScenarioRun& hd, const OperatingSnr& r5, std::string& detail) {
    const OperatingSnr r3 = op_of(hd, StreamId::R3);
    detail = "R5 " + fmt(r5) + " vs R3 " + fmt(r3);
    return within(r5, r3, kOpSnrTolDb);
}

/// Stream-mixing mutant: first half from l1, second half from l3.
Combined mixing_combiner(const LlrVector& l1, const ReceiverOutput& l3, DecisionRule rule, const DetectorConfig& cfg) {
    Combined c = combine(l1, l3, rule, cfg);
    if (const auto* v = std::get_if<LlrVector>(&l3); v && v->size() == l1.size() && l1.size() >= 2) {
        std::vector<double> mixed(l1.values().begin(), l1.values().end());
        for (std::size_t i = mixed.size() / 2; i < mixed.size(); ++i) mixed[i] = (*v)[i];
        if (mixed != std::vector<double>(l1.values().begin(), l1.values().end()) &&
            mixed != std::vector<double>(v->values().begin(), v->values().end()))
            c.output = LlrVector(std::move(mixed), c.output.stream());
    }
    return c;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Context {
    BenchConfig cfg;
    BenchResources res;
    std::map<int, ScenarioRun> full;
    std::map<int, double> full_seconds;

    const ScenarioRun& run(int id) {
        if (auto it = full.find(id); it != full.end()) return it->second;
        SweepConfig sw = cfg.sweep;
        sw.receivers = {StreamId::R0, StreamId::R1, StreamId::R3, StreamId::R5, StreamId::R5c, StreamId::R5or,
                        StreamId::R5and};
        const auto t0 = Clock::now();
        auto [it, _] = full.emplace(id, run_scenario(cfg, res, cfg.scenario(id), sw));
        full_seconds[id] = seconds_since(t0);
        std::cout << "  (scenario " << id << ": " << sw.snr_db.size() << " SNR points x " << sw.slots_per_point
                  << " slots in " << fmt(full_seconds[id], 1) << " s)" << std::endl;
        return it->second;
    }
};

void criterion1(Context& ctx) {
    Prop1Config pc;
    pc.seed = ctx.cfg.sweep.base_seed;
    const PropReport good = prop1_suite(pc, combine, &ctx.cfg, &ctx.res);
    const PropReport bad = prop1_suite(pc, mixing_combiner, &ctx.cfg, &ctx.res);
    const bool ok = good.pass() && good.slots >= 10000 && !bad.pass() && good.seconds < kProp1Seconds;
    report(1, ok, "bounded output over >=1e4 slots, mutant rejected, < 60 s",
           std::to_string(good.slots) + " slots, " + std::to_string(good.checks) + " checks, " +
               std::to_string(good.violations) + " violations in " + fmt(good.seconds, 1) + " s; mutant " +
               std::to_string(bad.violations) + " violations");
}

void criterion2(Context& ctx) {
    Prop2Config pc;
    pc.seed = ctx.cfg.sweep.base_seed;
    pc.pcw = ctx.cfg.sweep.pcw;
    const PropReport r = prop2_suite(pc, &ctx.cfg, &ctx.res);
    const bool ok = r.pass() && r.slots >= 1000 && pc.trials >= 1000 && r.seconds < kProp2Seconds &&
                    std::abs(pc.pcw.delta_max - std::log(4.0)) < 1e-15;
    report(2, ok, "bounded residual, delta_max = ln 4, >=1e3 slots x 1e3 trials, < 120 s",
           std::to_string(r.slots) + " slots, " + std::to_string(r.checks) + " checks, " +
               std::to_string(r.violations) + " violations in " + fmt(r.seconds, 1) + " s");
}

void criterion3(Context& ctx) {
    const ScenarioRun& sf = ctx.run(13);
    bool r3_dead = true;
    for (const auto& p : sf.points)
        if (p.snr_db >= 4.0) r3_dead = r3_dead && p.stats(StreamId::R3).bler == 1.0;
    std::string detail;
    const bool rec = recovers(sf, op_of(sf, StreamId::R5), sf.sweep.detector.tau, detail);
    const bool ok = r3_dead && rec && sf.sweep.slots_per_point == 200 && ctx.full_seconds[13] < kRegimeSeconds;
    report(3, ok, "scenario 13: R3 BLER = 1 at >=4 dB, R5 within 0.3 dB of R1, rollback > 80% at >=8 dB",
           std::string("R3 dead ") + (r3_dead ? "yes" : "no") + ", " + detail);
}

void criterion4(Context& ctx) {
    const ScenarioRun& hd = ctx.run(10);
    const OperatingSnr r1 = op_of(hd, StreamId::R1);
    const OperatingSnr r3 = op_of(hd, StreamId::R3);
    const OperatingSnr r5 = op_of(hd, StreamId::R5);
    const OperatingSnr r5c = op_of(hd, StreamId::R5c);
    const bool ok = r1.fail() && !r3.fail() && r5.fail() && within(r5c, r3, kOpSnrTolDb) &&
                    ctx.full_seconds[10] < kRegimeSeconds;
    report(4, ok, "scenario 10: R1 collapses, R5 Fail, R5c within 0.3 dB of R3",
           "R1 " + fmt(r1) + ", R3 " + fmt(r3) + ", R5 " + fmt(r5) + ", R5c " + fmt(r5c));
}

void criterion5(Context& ctx) {
    const auto t0 = Clock::now();
    std::vector<ScenarioRun> runs{ctx.run(13), ctx.run(10)};
    const std::vector<double> taus = default_taus();
    const auto table = tau_sweep(runs, taus);
    const double elapsed = seconds_since(t0) + ctx.full_seconds[13] + ctx.full_seconds[10];
    std::map<double, bool> rec, cap;
    std::string detail;
    for (const auto& row : table) {
        std::string d;
        if (row.scenario_id == 13) rec[row.tau] = recovers(runs[0], row.r5, row.tau, d);
        else cap[row.tau] = captures(runs[1], row.r5, d);
        detail += " tau " + fmt(row.tau, 2) + " sc" + std::to_string(row.scenario_id) + ": " + d + ";";
    }
    bool none_both = true;
    for (double t : taus) none_both = none_both && !(rec[t] && cap[t]);
    const double lo = taus.front(), hi = taus.back();
    const bool ok = none_both && rec[lo] && !cap[lo] && !rec[hi] && cap[hi] && elapsed < kTauSweepSeconds;
    std::string flags;
    for (double t : taus) flags += " " + fmt(t, 2) + ":" + (rec[t] ? "3" : "-") + (cap[t] ? "4" : "-");
    report(5, ok, "tau sweep: no tau passes both, small tau recovers, large tau captures",
           "tau:recover/capture" + flags + " |" + detail);
}

void criterion6(Context& ctx) {
    const ScenarioRun& sf = ctx.run(13);
    const ScenarioRun& in = ctx.run(1);
    bool plateau = true;
    std::string detail = "sc13";
    for (const auto& p : sf.points)
        if (p.snr_db >= 10.0) {
            const double v = p.stats(StreamId::R3).pcw.value_or(-1.0);
            plateau = plateau && std::abs(v - kPcwTarget) <= kPcwTol;
            detail += " " + fmt(p.snr_db, 0) + ":" + fmt(v, 4);
        }
    std::vector<double> curve;
    detail += "; sc1";
    for (const auto& p : in.points) {
        curve.push_back(p.stats(StreamId::R3).pcw.value_or(-1.0));
        detail += " " + fmt(p.snr_db, 0) + ":" + fmt(curve.back(), 5);
    }
    bool decays = curve.size() >= 2 && curve.front() > 0.0 && curve.back() <= kPcwDecayRatio * curve.front();
    for (std::size_t i = 1; i < curve.size(); ++i) decays = decays && curve[i] <= curve[i - 1] + kPcwRiseTol;
    report(6, plateau && decays, "p_cw plateaus at 0.07 +/- 0.005 (>=10 dB) and decays in-distribution", detail);
}

void criterion7(Context& ctx) {
    // Uncoded QPSK over AWGN with h = 1. Es = 1 and complex noise of total
    // variance N0 give BER = Q(sqrt(2 Eb/N0)) with Eb = Es / 2.
    std::string detail;
    bool q_ok = true;
    SlotConfig slot;
    slot.modulation = Modulation::Qpsk;
    slot.n_rx = 1;
    const auto layout = make_slot_layout(slot);
    for (double es_n0_db : {4.0, 7.0, 9.0}) {
        std::size_t errors = 0, bits = 0;
        for (std::uint64_t trial = 0; trial < 20; ++trial) {
            Rng rng(derive_seed(99, {trial, 1}));
            std::vector<Bit> coded(layout->n_coded_bits());
            for (auto& b : coded) b = static_cast<Bit>(rng() & 1u);
            const TxSlot tx = assemble_tx_grid(coded, layout, derive_seed(99, {trial, 2}));
            ChannelRealization ch;
            ch.h = ResourceGrid(slot.n_subcarriers(), slot.n_symbols, 1);
            for (auto& v : ch.h.samples()) v = 1.0;
            ch.noise_var = SnrSpec{es_n0_db}.noise_var();
            const ResourceGrid rx = apply_channel(tx.grid, ch, derive_seed(99, {trial, 3}));
            std::vector<Complex> sym;
            for (const auto& re : layout->data_res) sym.push_back(rx.at(re.subcarrier, re.symbol, 0));
            const auto hard = qam_hard_demap(sym, Modulation::Qpsk);
            for (std::size_t j = 0; j < coded.size(); ++j) errors += hard[j] != coded[j];
            bits += coded.size();
        }
        const double ber = static_cast<double>(errors) / static_cast<double>(bits);
        const double p = q_function(std::sqrt(2.0 * std::pow(10.0, es_n0_db / 10.0) / 2.0));
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(bits));
        q_ok = q_ok && std::abs(ber - p) <= kQSigmas * se;
        detail += "Es/N0 " + fmt(es_n0_db, 0) + " dB BER " + fmt(ber, 5) + " vs " + fmt(p, 5) + "; ";
    }

    // R0 <= R1 on every scenario.
    bool order_ok = true;
    std::string bad;
    for (const auto& s : ctx.cfg.scenarios) {
        OperatingSnr r0, r1;
        if (auto it = ctx.full.find(s.id); it != ctx.full.end()) {
            r0 = op_of(it->second, StreamId::R0);
            r1 = op_of(it->second, StreamId::R1);
        } else {
            SweepConfig sw = ctx.cfg.sweep;
            sw.receivers = {StreamId::R0, StreamId::R1};
            const ScenarioRun run = run_scenario(ctx.cfg, ctx.res, s, sw);
            r0 = op_of(run, StreamId::R0);
            r1 = op_of(run, StreamId::R1);
        }
        if (!not_worse(r0, r1)) {
            order_ok = false;
            bad += " " + std::to_string(s.id);
        }
        detail += "sc" + std::to_string(s.id) + " " + fmt(r0) + "/" + fmt(r1) + " ";
    }

    // Noiseless round-trip of the shipped code at the default length.
    const LdpcCode code = LdpcCode::for_length(ctx.res.base_matrix, kExpectedBits);
    Rng rng(derive_seed(99, {7}));
    bool rt_ok = true;
    for (int w = 0; w < 100; ++w) {
        std::vector<Bit> info(code.k());
        for (auto& b : info) b = static_cast<Bit>(rng() & 1u);
        const auto c = code.encode(info);
        std::vector<double> llr(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) llr[j] = c[j] ? -kLlrClip : kLlrClip;
        const auto dec = code.decode(llr);
        rt_ok = rt_ok && dec.info_bits == info && dec.converged && code.is_codeword(c);
    }

    // Coding gain at BER 1e-3: the rate-1/2 code reaches it at Eb/N0 = 3 dB,
    // where uncoded BPSK sits far above it.
    const BaseMatrix half = load_base_matrix(ctx.cfg.resolve("ldpc_r1_2.txt").string());
    const LdpcCode c12(half, half.lifting_reference);
    const double ebn0 = std::pow(10.0, 3.0 / 10.0);
    const double sigma = std::sqrt(1.0 / (2.0 * c12.rate() * ebn0));
    std::normal_distribution<double> gauss(0.0, sigma);
    std::size_t info_errors = 0, info_bits = 0;
    while (info_bits < 100000) {
        std::vector<Bit> info(c12.k());
        for (auto& b : info) b = static_cast<Bit>(rng() & 1u);
        const auto c = c12.encode(info);
        std::vector<double> llr(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double y = (c[j] ? -1.0 : 1.0) + gauss(rng);
            llr[j] = 2.0 * y / (sigma * sigma);
        }
        const auto dec = c12.decode(llr);
        for (std::size_t j = 0; j < info.size(); ++j) info_errors += dec.info_bits[j] != info[j];
        info_bits += info.size();
    }
    const double coded_ber = static_cast<double>(info_errors) / static_cast<double>(info_bits);
    const double uncoded_ber = q_function(std::sqrt(2.0 * ebn0));
    const bool gain_ok = coded_ber < 1e-3 && uncoded_ber > 1e-3;
    detail += "; round-trip " + std::string(rt_ok ? "exact" : "BROKEN") + "; Eb/N0 3 dB coded BER " +
              fmt(coded_ber, 6) + " over " + std::to_string(info_bits) + " bits, uncoded " + fmt(uncoded_ber, 5);
    if (!bad.empty()) detail += "; R0 > R1 on" + bad;
    report(7, q_ok && order_ok && rt_ok && gain_ok, "QPSK Q-function oracle, R0 <= R1 everywhere, LDPC round-trip, coding gain",
           detail);
}

void criterion8(Context&) {
    const auto base = std::filesystem::temp_directory_path() / "drsim_acceptance_c8";
    std::filesystem::remove_all(base);
    std::vector<std::string> digests;
    bool rc_ok = true;
    std::ostringstream sink;
    for (const char* jobs : {"1", "1", "4"}) {
        const auto dir = base / (std::string("jobs") + jobs + "_" + std::to_string(digests.size()));
        const int rc = run_cli({"run", "--scenario", "13", "--seed", "7", "--jobs", jobs, "--out", dir.string()}, sink,
                               sink);
        rc_ok = rc_ok && rc == kExitOk;
        digests.push_back(slurp(dir / "results.csv") + slurp(dir / "summary.csv") + slurp(dir / "manifest.json"));
    }
    const bool same = !digests[0].empty() && digests[0] == digests[1] && digests[0] == digests[2];
    std::filesystem::remove_all(base);
    report(8, rc_ok && same, "run --scenario 13 --seed 7 byte-identical across runs and --jobs 1/4",
           std::string("exit codes ") + (rc_ok ? "0" : "nonzero") + ", outputs " + (same ? "identical" : "DIFFER") +
               " (" + std::to_string(digests[0].size()) + " bytes)");
}

void criterion9(Context& ctx) {
    LatencyConfig lc;
    lc.reps = 100;
    lc.warmup = 10;
    const LatencyReport rep = latency_bench(ctx.cfg, ctx.res, ctx.cfg.scenario(1), lc);
    bool complete = true;
    for (const char* name : {"r0_chain", "r1_chain", "r3_surrogate", "detect_hard", "detect_confidence",
                             "ldpc_decode", "r5_pipeline"}) {
        const auto& c = rep.component(name);
        complete = complete && c.samples == lc.reps && c.min_ms <= c.median_ms && c.median_ms <= c.max_ms &&
                   c.min_ms <= c.mean_ms && c.mean_ms <= c.max_ms && c.std_ms >= 0.0;
    }
    const double det = rep.component("detect_hard").mean_ms + rep.component("detect_confidence").mean_ms;
    report(9, complete && rep.detector_fraction < kDetectorFraction,
           "latency 100 reps / 10 warmup, detectors < 5% of R5 pipeline",
           "detectors " + fmt(det, 4) + " ms of pipeline " + fmt(rep.component("r5_pipeline").mean_ms, 3) +
               " ms = " + fmt(100.0 * rep.detector_fraction, 2) + "%");
}

void criterion10(Context& ctx) {
    bool ok = true;
    std::string detail;
    for (int id : {1, 10, 13}) {
        const ScenarioRun& run = ctx.run(id);
        const double tau = run.sweep.detector.tau;
        std::size_t n = 0, dis = 0, con = 0;
        for (const auto& pt : run.records)
            for (const auto& r : pt) {
                ++n;
                dis += r.trusts(DecisionRule::Disjunctive, tau) == r.trusts(DecisionRule::Confidence, tau);
                con += r.trusts(DecisionRule::Conjunctive, tau) == r.trusts(DecisionRule::Hard, tau);
            }
        const double a = static_cast<double>(dis) / static_cast<double>(n);
        const double b = static_cast<double>(con) / static_cast<double>(n);
        ok = ok && a > kEnsembleAgreement && b > kEnsembleAgreement;
        detail += "sc" + std::to_string(id) + " OR~R5c " + fmt(100.0 * a, 2) + "%, AND~R5 " + fmt(100.0 * b, 2) + "%; ";
    }
    report(10, ok, "ensembles degenerate: OR agrees with R5c and AND with R5 on > 95% of slots", detail);
}

void criterion11(Context& ctx) {
    const Scenario& s = ctx.cfg.scenario(1);
    const auto layout = make_slot_layout(s.slot_config());
    const std::size_t n = layout->n_coded_bits();
    const LdpcCode code = LdpcCode::for_length(ctx.res.base_matrix, n);
    const bool ok = n == kExpectedBits && code.n() == n;
    report(11, ok, "default slot carries 16224 coded bits and the code is sized to it",
           std::to_string(layout->data_res.size()) + " data REs x " + std::to_string(bits_per_symbol(s.modulation)) +
               " = " + std::to_string(n) + " bits, code n = " + std::to_string(code.n()) +
               ", k = " + std::to_string(code.k()) + ", Z = " + std::to_string(code.lifting()));
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
    auto want = [&](int c) { return only.empty() || only.count(c) > 0; };

    Context ctx;
    try {
        ctx.cfg = load_bench_config(default_config_path());
        ctx.res = load_resources(ctx.cfg);
    } catch (const std::exception& e) {
        std::cout << "FAIL setup: " << e.what() << std::endl;
        return 1;
    }
    using Fn = void (*)(Context&);
    const std::vector<std::pair<int, Fn>> criteria{
        {11, criterion11}, {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6},   {10, criterion10}, {9, criterion9}, {8, criterion8}, {7, criterion7}};
    for (const auto& [id, fn] : criteria) {
        if (!want(id)) continue;
        try {
            fn(ctx);
        } catch (const std::exception& e) {
            report(id, false, "threw", e.what());
        }
    }
    std::cout << (failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL (" + std::to_string(failures) + ")")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
