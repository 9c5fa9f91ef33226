// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <mutex>
#include <thread>

#include "drsim/rxchain.hpp"
#include "drsim/seed.hpp"

namespace drsim {

bool SlotRecord::trusts(DecisionRule rule, double tau) const {
    if (forced_rollback) return false;
    switch (rule) {
        case DecisionRule::Hard: return hard_trust(tau);
        case DecisionRule::Confidence: return confidence_trust;
        case DecisionRule::Disjunctive: return hard_trust(tau) || confidence_trust;
        case DecisionRule::Conjunctive: return hard_trust(tau) && confidence_trust;
    }
    return false;
}

const ReceiverStats& SnrPointResult::stats(StreamId id) const {
    for (const auto& r : receivers)
        if (r.receiver == id) return r;
    throw ArgumentError("receiver " + to_string(id) + " not in result");
}

std::vector<std::pair<double, double>> ScenarioRun::bler_curve(StreamId id) const {
    std::vector<std::pair<double, double>> c;
    c.reserve(points.size());
    for (const auto& p : points) c.emplace_back(p.snr_db, p.stats(id).bler);
    return c;
}

namespace {

std::optional<DecisionRule> rule_of(StreamId id) {
    switch (id) {
        case StreamId::R5: return DecisionRule::Hard;
        case StreamId::R5c: return DecisionRule::Confidence;
        case StreamId::R5or: return DecisionRule::Disjunctive;
        case StreamId::R5and: return DecisionRule::Conjunctive;
        default: return std::nullopt;
    }
}

const StreamScore& stream_score(const SlotRecord& r, StreamId id, const DetectorConfig& det) {
    auto need = [](const std::optional<StreamScore>& s, const char* name) -> const StreamScore& {
        if (!s) throw ArgumentError(std::string("slot record lacks stream ") + name);
        return *s;
    };
    switch (id) {
        case StreamId::R0: return need(r.r0, "R0");
        case StreamId::R1: return need(r.r1, "R1");
        case StreamId::R3: return need(r.r3, "R3");
        default: break;
    }
    auto rule = rule_of(id);
    if (!rule) throw ArgumentError("unsupported stream");
    return r.trusts(*rule, det.tau) ? need(r.r3, "R3") : need(r.r1, "R1");
}

StreamScore score_stream(const LdpcCode& code, const LlrVector& l, std::span<const Bit> info,
                         std::span<const Bit> coded) {
    const DecodeResult dec = code.decode(l.values());
    const SlotScore s = score_decode(dec, info, l.values(), coded);
    return {s.block_error, s.coded_bit_errors};
}

}  // namespace

SlotSimulator::SlotSimulator(const BenchConfig& cfg, const BenchResources& res, const Scenario& s,
                             const SweepConfig& sweep, Combiner combiner)
    : cfg_(cfg),
      scenario_(s),
      sweep_(sweep),
      taps_(tap_profile(res, s)),
      layout_(make_slot_layout(s.slot_config())),
      code_(LdpcCode::for_length(res.base_matrix, layout_->n_coded_bits(), cfg.code.max_iterations,
                                 cfg.code.min_sum_scale)),
      combiner_(std::move(combiner)) {
    validate(s.surrogate_mode);
}

ProfilePoint SlotSimulator::profile_point(double snr_db) const {
    return {layout_, taps_, scenario_.delay_spread_s, scenario_.doppler_hz, cfg_.channel, snr_db};
}

MagnitudeProfile SlotSimulator::profile_for(std::size_t snr_index) const {
    const auto* sf = std::get_if<SilentFailure>(&scenario_.surrogate_mode);
    if (!sf || sf->source != MagnitudeSource::Profile) return {};
    const auto seed = derive_seed(sweep_.base_seed, {static_cast<std::uint64_t>(scenario_.id), snr_index,
                                                     tag(SeedStream::Profile)});
    return in_distribution_magnitude_profile(profile_point(sweep_.snr_db.at(snr_index)), cfg_.magnitude_profile.alpha,
                                             cfg_.magnitude_profile.slots, seed);
}

SlotSimulator::SlotArtifacts SlotSimulator::generate(std::size_t snr_index, std::size_t slot_index) const {
    const std::uint64_t id = static_cast<std::uint64_t>(scenario_.id);
    auto seed = [&](SeedStream s) { return derive_seed(sweep_.base_seed, {id, snr_index, slot_index, tag(s)}); };
    SlotArtifacts a;
    Rng bit_rng(seed(SeedStream::InfoBits));
    a.info_bits.resize(code_.k());
    for (Bit& b : a.info_bits) b = static_cast<Bit>(bit_rng() >> 63);
    a.coded_bits = code_.encode(a.info_bits);
    a.tx = assemble_tx_grid(a.coded_bits, layout_, seed(SeedStream::Pilots));
    a.channel = realize_channel(taps_, scenario_.delay_spread_s, scenario_.doppler_hz, layout_->config,
                                seed(SeedStream::Channel), cfg_.channel);
    a.channel.noise_var = SnrSpec{sweep_.snr_db.at(snr_index)}.noise_var();
    a.rx = apply_channel(a.tx.grid, a.channel, seed(SeedStream::Noise));
    a.surrogate_seed = seed(SeedStream::Surrogate);
    return a;
}

SlotRecord SlotSimulator::simulate(std::size_t snr_index, std::size_t slot_index,
                                   const MagnitudeProfile* profile) const {
    const SlotArtifacts a = generate(snr_index, slot_index);
    SlotRecord rec;
    rec.n_bits = a.coded_bits.size();
    const bool arbiter = sweep_.wants_arbiter();

    if (sweep_.wants(StreamId::R0)) {
        rec.r0 = score_stream(code_, receive_r0(a.rx, a.channel, *layout_), a.info_bits, a.coded_bits);
    }
    std::optional<LlrVector> l1;
    if (arbiter || sweep_.wants(StreamId::R1)) {
        l1 = receive_r1(a.rx, a.tx.pilots, scenario_.r1_time_interpolation);
        rec.r1 = score_stream(code_, *l1, a.info_bits, a.coded_bits);
    }
    if (!arbiter && !sweep_.wants(StreamId::R3)) return rec;

    const ReceiverOutput o3 =
        receive_r3({a.rx, a.channel, a.coded_bits, *layout_, a.surrogate_seed, profile}, scenario_.surrogate_mode);
    if (const auto* l3 = std::get_if<LlrVector>(&o3)) {
        rec.r3 = score_stream(code_, *l3, a.info_bits, a.coded_bits);
        rec.pcw = pcw_fraction(*l3, a.coded_bits, sweep_.pcw);
        const bool silent = std::holds_alternative<SilentFailure>(scenario_.surrogate_mode);
        if (silent && sweep_.residual_witness_period > 0 && slot_index % sweep_.residual_witness_period == 0) {
            rec.residual_checked = true;
            rec.residual_ok = check_bounded_residual(*l3, a.coded_bits, sweep_.pcw, sweep_.residual_witness_trials,
                                                     derive_seed(a.surrogate_seed, {tag(SeedStream::Residual)}));
        }
    } else {
        rec.r3 = StreamScore{true, rec.n_bits};
    }
    if (!arbiter) return rec;

    std::vector<DecisionRule> rules{DecisionRule::Hard, DecisionRule::Confidence};
    if (sweep_.wants(StreamId::R5or)) rules.push_back(DecisionRule::Disjunctive);
    if (sweep_.wants(StreamId::R5and)) rules.push_back(DecisionRule::Conjunctive);
    for (DecisionRule rule : rules) {
        const Combined c = combiner_(*l1, o3, rule, sweep_.detector);
        if (!check_bounded_output(*l1, o3, c.output)) ++rec.bounded_output_violations;
        if (rule == DecisionRule::Hard) {
            rec.forced_rollback = c.decision.forced;
            rec.d = c.decision.d;
        } else if (rule == DecisionRule::Confidence) {
            rec.confidence_fraction = c.decision.confidence_fraction;
            rec.confidence_trust = c.decision.trusted();
        }
    }
    return rec;
}

SnrPointResult aggregate(const Scenario& s, double snr_db, std::span<const SlotRecord> records,
                         std::span<const StreamId> receivers, const DetectorConfig& det) {
    SnrPointResult out;
    out.scenario_id = s.id;
    out.scenario_name = s.name;
    out.snr_db = snr_db;
    const double n = static_cast<double>(records.size());
    for (StreamId id : receivers) {
        ReceiverStats st;
        st.receiver = id;
        st.slots = records.size();
        if (records.empty()) {
            out.receivers.push_back(st);
            continue;
        }
        std::size_t block = 0, bit_err = 0, bits = 0;
        for (const auto& r : records) {
            const StreamScore& sc = stream_score(r, id, det);
            block += sc.block_error ? 1 : 0;
            bit_err += sc.coded_bit_errors;
            bits += r.n_bits;
        }
        st.bler = static_cast<double>(block) / n;
        st.coded_ber = bits ? static_cast<double>(bit_err) / static_cast<double>(bits) : 0.0;
        if (id == StreamId::R3) {
            double sum = 0.0;
            std::size_t cnt = 0;
            for (const auto& r : records)
                if (r.pcw) {
                    sum += *r.pcw;
                    ++cnt;
                }
            if (cnt) st.pcw = sum / static_cast<double>(cnt);
        }
        if (auto rule = rule_of(id)) {
            std::size_t rollback = 0, forced = 0, n_d = 0, n_c = 0;
            double sum_d = 0.0, sum_c = 0.0;
            for (const auto& r : records) {
                rollback += r.trusts(*rule, det.tau) ? 0 : 1;
                forced += r.forced_rollback ? 1 : 0;
                if (!r.forced_rollback) {
                    sum_d += r.d;
                    ++n_d;
                }
                if (r.confidence_fraction) {
                    sum_c += *r.confidence_fraction;
                    ++n_c;
                }
            }
            st.rollback_rate = static_cast<double>(rollback) / n;
            st.forced_rollback_rate = static_cast<double>(forced) / n;
            if (n_d) st.mean_d = sum_d / static_cast<double>(n_d);
            if (n_c) st.mean_confidence_fraction = sum_c / static_cast<double>(n_c);
        }
        out.receivers.push_back(st);
    }
    return out;
}

ScenarioRun run_scenario(const BenchConfig& cfg, const BenchResources& res, const Scenario& s,
                         const SweepConfig& sweep, Combiner combiner) {
    sweep.validate();
    SlotSimulator sim(cfg, res, s, sweep, std::move(combiner));
    ScenarioRun run;
    run.scenario = s;
    run.sweep = sweep;
    run.records.resize(sweep.snr_db.size());
    for (std::size_t si = 0; si < sweep.snr_db.size(); ++si) {
        const MagnitudeProfile profile = sim.profile_for(si);
        const MagnitudeProfile* pp = profile.empty() ? nullptr : &profile;
        auto& recs = run.records[si];
        recs.resize(sweep.slots_per_point);
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mu;
        auto worker = [&] {
            for (std::size_t k; (k = next.fetch_add(1)) < recs.size();) {
                try {
                    recs[k] = sim.simulate(si, k, pp);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                    next = recs.size();
                }
            }
        };
        const std::size_t n_workers = std::min(sweep.jobs, recs.size());
        if (n_workers <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        if (error) std::rethrow_exception(error);
        for (const auto& r : recs) {
            run.bounded_output_violations += r.bounded_output_violations;
            if (r.residual_checked) {
                ++run.residual_checks;
                if (!r.residual_ok) ++run.residual_violations;
            }
        }
        run.points.push_back(aggregate(s, sweep.snr_db[si], recs, sweep.receivers, sweep.detector));
    }
    return run;
}

OperatingSnr operating_snr(std::span<const std::pair<double, double>> curve, std::size_t slots, double target) {
    if (curve.empty()) throw ArgumentError("operating_snr needs a non-empty curve");
    if (slots < 1) throw ArgumentError("operating_snr needs slots >= 1");
    if (!(target > 0.0 && target < 1.0)) throw ArgumentError("target BLER must lie in (0, 1)");
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (!(curve[i].first > curve[i - 1].first)) throw ArgumentError("curve must be sorted by SNR");
    const double floor = 0.5 / static_cast<double>(slots);
    auto lg = [&](double b) { return std::log10(std::max(b, floor)); };
    OperatingSnr op;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i].second > target) continue;
        if (i == 0) {
            op.value_db = curve[0].first;
            op.below_range = curve[0].second < target;
            return op;
        }
        const double y0 = lg(curve[i - 1].second), y1 = lg(curve[i].second), yt = std::log10(target);
        const double x0 = curve[i - 1].first, x1 = curve[i].first;
        op.value_db = y0 == y1 ? x1 : x0 + (y0 - yt) / (y0 - y1) * (x1 - x0);
        op.bracket = std::make_pair(i - 1, i);
        return op;
    }
    return op;
}

std::string format_operating_snr(const OperatingSnr& op, int precision) {
    if (op.fail()) return "Fail";
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << *op.value_db;
    if (op.below_range) os << "(<=)";
    return os.str();
}

BootstrapInterval bootstrap_operating_snr(const ScenarioRun& run, StreamId id, std::size_t resamples,
                                          std::uint64_t seed, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ArgumentError("confidence level must lie in (0, 1)");
    BootstrapInterval bi;
    bi.resamples = resamples;
    if (resamples == 0 || run.records.empty()) return bi;
    std::vector<std::vector<char>> errs(run.records.size());
    for (std::size_t si = 0; si < run.records.size(); ++si)
        for (const auto& r : run.records[si])
            errs[si].push_back(stream_score(r, id, run.sweep.detector).block_error ? 1 : 0);
    Rng rng(seed);
    std::vector<double> values;
    std::size_t fails = 0;
    std::vector<std::pair<double, double>> curve(run.records.size());
    for (std::size_t b = 0; b < resamples; ++b) {
        for (std::size_t si = 0; si < errs.size(); ++si) {
            const auto& e = errs[si];
            std::size_t cnt = 0;
            if (!e.empty()) {
                std::uniform_int_distribution<std::size_t> pick(0, e.size() - 1);
                for (std::size_t k = 0; k < e.size(); ++k) cnt += static_cast<std::size_t>(e[pick(rng)]);
            }
            curve[si] = {run.sweep.snr_db[si], e.empty() ? 1.0 : static_cast<double>(cnt) / e.size()};
        }
        const OperatingSnr op = operating_snr(curve, run.sweep.slots_per_point);
        if (op.fail()) ++fails;
        else values.push_back(*op.value_db);
    }
    bi.fail_fraction = static_cast<double>(fails) / static_cast<double>(resamples);
    if (!values.empty()) {
        std::sort(values.begin(), values.end());
        auto at = [&](double q) {
            const double pos = q * static_cast<double>(values.size() - 1);
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const auto hi = std::min(lo + 1, values.size() - 1);
            return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
        };
        bi.lo_db = at((1.0 - level) / 2.0);
        bi.hi_db = at(1.0 - (1.0 - level) / 2.0);
    }
    return bi;
}

std::vector<double> default_taus() { return {0.01, 0.05, 0.10, 0.20, 0.50}; }

std::vector<TauSweepRow> tau_sweep(std::span<const ScenarioRun> runs, std::span<const double> taus) {
    std::vector<TauSweepRow> rows;
    for (const auto& run : runs) {
        if (!run.sweep.wants_arbiter()) throw ArgumentError("tau sweep needs runs with arbiter records");
        for (double tau : taus) {
            DetectorConfig det = run.sweep.detector;
            det.tau = tau;
            det.validate();
            std::vector<std::pair<double, double>> curve;
            std::size_t rollback = 0, total = 0;
            for (std::size_t si = 0; si < run.records.size(); ++si) {
                std::size_t block = 0;
                for (const auto& r : run.records[si]) {
                    const bool trust = r.trusts(DecisionRule::Hard, tau);
                    rollback += trust ? 0 : 1;
                    block += stream_score(r, StreamId::R5, det).block_error ? 1 : 0;
                }
                total += run.records[si].size();
                curve.emplace_back(run.sweep.snr_db[si], run.records[si].empty()
                                                             ? 1.0
                                                             : static_cast<double>(block) / run.records[si].size());
            }
            TauSweepRow row;
            row.scenario_id = run.scenario.id;
            row.scenario_name = run.scenario.name;
            row.tau = tau;
            row.r5 = operating_snr(curve, run.sweep.slots_per_point);
            row.mean_rollback_rate = total ? static_cast<double>(rollback) / static_cast<double>(total) : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

MonitorResult silent_failure_monitor(const ReceiverOutput& l3, std::size_t expected_n, const MagnitudeProfile& profile,
                                     double ks_limit) {
    MonitorResult m;
    const auto* v = std::get_if<LlrVector>(&l3);
    if (!v) return m;
    m.applicable = true;
    m.length_ok = v->size() == expected_n;
    m.finite_ok = std::all_of(v->values().begin(), v->values().end(), [](double x) { return std::isfinite(x); });
    if (profile.empty() || v->size() == 0) return m;
    std::vector<double> mags(v->size());
    std::transform(v->values().begin(), v->values().end(), mags.begin(), [](double x) { return std::abs(x); });
    m.ks = ks_statistic(mags, profile.quantiles());
    m.magnitude_ok = m.ks < ks_limit;
    return m;
}

}  // namespace drsim
