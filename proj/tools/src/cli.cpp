// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "drsim/bench.hpp"
#include "drsim/latency.hpp"
#include "drsim/props.hpp"
#include "drsim/results.hpp"
#include "drsim/seed.hpp"

namespace drsim {

namespace {

struct CommonOptions {
    std::string config;
    std::string out = "drsim-out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> slots;
    std::vector<double> snr;
    std::vector<std::string> receivers;
    std::optional<double> tau;
    std::size_t jobs = 1;
    std::vector<int> scenarios;
};

void add_config(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config, "Scenario/sweep YAML file (default: bundled registry)");
}

void add_common(CLI::App* app, CommonOptions& o) {
    add_config(app, o);
    app->add_option("--out", o.out, "Output directory")->capture_default_str();
    app->add_option("--seed", o.seed, "Base seed (default from config)");
    app->add_option("--slots", o.slots, "Slots per SNR point (default from config)");
    app->add_option("--snr", o.snr, "Comma-separated SNR list in dB")->delimiter(',');
    app->add_option("--receivers", o.receivers, "Comma-separated receivers: R0,R1,R3,R5,R5c,R5or,R5and")
        ->delimiter(',');
    app->add_option("--tau", o.tau, "Hard-disagreement threshold (default from config)");
    app->add_option("--jobs", o.jobs, "Worker threads; output does not depend on it")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

struct Loaded {
    BenchConfig cfg;
    BenchResources res;
};

Loaded load(const CommonOptions& o) {
    const std::filesystem::path path = o.config.empty() ? default_config_path() : std::filesystem::path(o.config);
    Loaded l{load_bench_config(path), {}};
    auto& sw = l.cfg.sweep;
    if (o.seed) sw.base_seed = *o.seed;
    if (o.slots) sw.slots_per_point = *o.slots;
    if (!o.snr.empty()) sw.snr_db = o.snr;
    if (!o.receivers.empty()) {
        sw.receivers.clear();
        for (const auto& r : o.receivers) sw.receivers.push_back(parse_stream(r));
    }
    if (o.tau) sw.detector.tau = *o.tau;
    sw.jobs = o.jobs;
    sw.validate();
    l.res = load_resources(l.cfg);
    return l;
}

std::vector<Scenario> select(const BenchConfig& cfg, const std::vector<int>& ids) {
    if (ids.empty()) return cfg.scenarios;
    std::vector<Scenario> out;
    for (int id : ids) out.push_back(cfg.scenario(id));
    return out;
}

std::filesystem::path prepare_out(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

std::string fixed(double v, int prec) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

std::string interval(const BootstrapInterval& bi) {
    if (!bi.lo_db) return "[Fail]";
    return "[" + fixed(*bi.lo_db, 2) + ", " + fixed(*bi.hi_db, 2) + "]";
}

int cmd_list(const CommonOptions& o, std::ostream& out) {
    const BenchConfig cfg = load_bench_config(o.config.empty() ? default_config_path() : std::filesystem::path(o.config));
    out << std::left << std::setw(4) << "#" << std::setw(16) << "Scenario" << std::setw(14) << "Axis" << std::setw(32)
        << "Value" << std::setw(8) << "Taps" << std::setw(10) << "Doppler" << std::setw(10) << "Delay" << std::setw(8)
        << "Mod" << std::setw(8) << "AddPos" << "Surrogate\n";
    for (const auto& s : cfg.scenarios) {
        out << std::left << std::setw(4) << s.id << std::setw(16) << s.name << std::setw(14) << s.axis << std::setw(32)
            << s.value << std::setw(8) << s.tap_profile << std::setw(10) << (fixed(s.doppler_hz, 0) + " Hz")
            << std::setw(10) << (fixed(s.delay_spread_s * 1e9, 0) + " ns") << std::setw(8) << to_string(s.modulation)
            << std::setw(8) << s.dmrs_additional_positions << describe(s.surrogate_mode) << '\n';
    }
    return kExitOk;
}

int cmd_run(const CommonOptions& o, std::ostream& out, std::ostream& err, const CliHooks& hooks) {
    Loaded l = load(o);
    const auto scenarios = select(l.cfg, o.scenarios);
    const auto dir = prepare_out(o.out);
    std::vector<ResultRow> rows;
    std::vector<std::vector<std::string>> summary, errors;
    bool violation = false;
    for (const auto& s : scenarios) {
        try {
            const ScenarioRun run = run_scenario(l.cfg, l.res, s, l.cfg.sweep, hooks.combiner);
            auto r = to_rows(run.points);
            rows.insert(rows.end(), r.begin(), r.end());
            out << "scenario " << s.id << " (" << s.name << ")\n";
            for (StreamId id : l.cfg.sweep.receivers) {
                const OperatingSnr op = operating_snr(run.bler_curve(id), l.cfg.sweep.slots_per_point);
                const BootstrapInterval bi = bootstrap_operating_snr(
                    run, id, 200, derive_seed(l.cfg.sweep.base_seed, {static_cast<std::uint64_t>(s.id), 0xb007}));
                double rollback = 0.0;
                bool has_rb = false;
                for (const auto& p : run.points)
                    if (const auto& st = p.stats(id); st.rollback_rate) {
                        rollback += *st.rollback_rate;
                        has_rb = true;
                    }
                rollback /= static_cast<double>(run.points.size());
                out << "  " << std::left << std::setw(6) << to_string(id) << " op_snr " << std::setw(10)
                    << format_operating_snr(op) << " 95% CI " << std::setw(18) << interval(bi);
                if (has_rb) out << " rollback " << fixed(100.0 * rollback, 1) << "%";
                out << '\n';
                summary.push_back({std::to_string(s.id), s.name, to_string(id),
                                   op.fail() ? "" : format_double(*op.value_db), op.fail() ? "1" : "0",
                                   bi.lo_db ? format_double(*bi.lo_db) : "", bi.hi_db ? format_double(*bi.hi_db) : "",
                                   format_double(bi.fail_fraction), has_rb ? format_double(rollback) : ""});
            }
            if (run.property_violation()) {
                violation = true;
                err << "scenario " << s.id << ": " << run.bounded_output_violations << " bounded-output and "
                    << run.residual_violations << " bounded-residual violations\n";
                errors.push_back({std::to_string(s.id), s.name, "property violation"});
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            violation = true;
            err << "scenario " << s.id << " failed: " << e.what() << '\n';
            errors.push_back({std::to_string(s.id), s.name, e.what()});
        }
    }
    write_results(dir / "results.csv", rows);
    write_table_csv(dir / "summary.csv",
                    {"scenario_id", "scenario_name", "receiver", "operating_snr_db", "fail", "ci_lo_db", "ci_hi_db",
                     "bootstrap_fail_fraction", "mean_rollback_rate"},
                    summary);
    if (!errors.empty()) write_table_csv(dir / "errors.csv", {"scenario_id", "scenario_name", "error"}, errors);
    write_json(dir / "manifest.json", make_manifest(l.cfg, l.res, l.cfg.sweep, scenarios));
    return violation ? kExitViolation : kExitOk;
}

int cmd_tau(const CommonOptions& o, const std::vector<double>& taus, std::ostream& out, const CliHooks& hooks) {
    Loaded l = load(o);
    auto& sw = l.cfg.sweep;
    if (!sw.wants(StreamId::R5)) sw.receivers.push_back(StreamId::R5);
    const auto scenarios = select(l.cfg, o.scenarios.empty() ? std::vector<int>{13, 10} : o.scenarios);
    const auto dir = prepare_out(o.out);
    std::vector<ScenarioRun> runs;
    std::vector<ResultRow> rows;
    bool violation = false;
    for (const auto& s : scenarios) {
        runs.push_back(run_scenario(l.cfg, l.res, s, sw, hooks.combiner));
        violation = violation || runs.back().property_violation();
        auto r = to_rows(runs.back().points);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    const auto table = tau_sweep(runs, taus);
    std::vector<std::vector<std::string>> csv;
    out << std::left << std::setw(18) << "scenario" << std::setw(8) << "tau" << std::setw(12) << "R5 op_snr"
        << "rollback\n";
    for (const auto& t : table) {
        out << std::left << std::setw(18) << t.scenario_name << std::setw(8) << fixed(t.tau, 2) << std::setw(12)
            << format_operating_snr(t.r5) << fixed(100.0 * t.mean_rollback_rate, 1) << "%\n";
        csv.push_back({std::to_string(t.scenario_id), t.scenario_name, format_double(t.tau),
                       t.r5.fail() ? "" : format_double(*t.r5.value_db), t.r5.fail() ? "1" : "0",
                       format_double(t.mean_rollback_rate)});
    }
    write_table_csv(dir / "tau_sweep.csv",
                    {"scenario_id", "scenario_name", "tau", "operating_snr_db", "fail", "mean_rollback_rate"}, csv);
    write_results(dir / "results.csv", rows);
    auto manifest = make_manifest(l.cfg, l.res, sw, scenarios);
    manifest["taus"] = taus;
    write_json(dir / "manifest.json", manifest);
    return violation ? kExitViolation : kExitOk;
}

int cmd_pcw(const CommonOptions& o, std::ostream& out) {
    Loaded l = load(o);
    auto& sw = l.cfg.sweep;
    sw.receivers = {StreamId::R3};
    const auto scenarios = select(l.cfg, o.scenarios.empty() ? std::vector<int>{13, 1} : o.scenarios);
    const auto dir = prepare_out(o.out);
    std::vector<std::vector<std::string>> csv;
    bool violation = false;
    for (const auto& s : scenarios) {
        const ScenarioRun run = run_scenario(l.cfg, l.res, s, sw);
        violation = violation || run.property_violation();
        out << "scenario " << s.id << " (" << s.name << ")\n";
        for (const auto& p : run.points) {
            const auto& st = p.stats(StreamId::R3);
            const double pcw = st.pcw.value_or(0.0);
            out << "  snr " << std::setw(6) << fixed(p.snr_db, 1) << " pcw " << fixed(pcw, 4) << '\n';
            csv.push_back({std::to_string(s.id), s.name, format_double(p.snr_db), std::to_string(st.slots),
                           st.pcw ? format_double(*st.pcw) : "", format_double(st.bler)});
        }
    }
    write_table_csv(dir / "pcw.csv", {"scenario_id", "scenario_name", "snr_db", "slots", "pcw", "r3_bler"}, csv);
    write_json(dir / "manifest.json", make_manifest(l.cfg, l.res, sw, scenarios));
    return violation ? kExitViolation : kExitOk;
}

int cmd_latency(const CommonOptions& o, const LatencyConfig& lc_in, std::ostream& out) {
    Loaded l = load(o);
    LatencyConfig lc = lc_in;
    if (!o.snr.empty()) lc.snr_db = o.snr.front();
    const Scenario& s = l.cfg.scenario(o.scenarios.empty() ? 1 : o.scenarios.front());
    const auto dir = prepare_out(o.out);
    const LatencyReport rep = latency_bench(l.cfg, l.res, s, lc);
    out << "latency, scenario " << s.id << " (" << s.name << "), " << lc.reps << " reps after " << lc.warmup
        << " warmup, SNR " << fixed(lc.snr_db, 1) << " dB\n";
    out << std::left << std::setw(20) << "component" << std::right << std::setw(10) << "mean" << std::setw(10)
        << "median" << std::setw(10) << "std" << std::setw(10) << "min" << std::setw(10) << "max" << "  (ms)\n";
    std::vector<std::vector<std::string>> csv;
    for (const auto& c : rep.components) {
        out << std::left << std::setw(20) << c.name << std::right << std::setw(10) << fixed(c.mean_ms, 4)
            << std::setw(10) << fixed(c.median_ms, 4) << std::setw(10) << fixed(c.std_ms, 4) << std::setw(10)
            << fixed(c.min_ms, 4) << std::setw(10) << fixed(c.max_ms, 4) << '\n';
        csv.push_back({c.name, std::to_string(c.samples), format_double(c.mean_ms), format_double(c.median_ms),
                       format_double(c.std_ms), format_double(c.min_ms), format_double(c.max_ms)});
    }
    out << "detector fraction of R5 pipeline: " << fixed(100.0 * rep.detector_fraction, 2) << "%\n";
    write_table_csv(dir / "latency.csv", {"component", "samples", "mean_ms", "median_ms", "std_ms", "min_ms", "max_ms"},
                    csv);
    return kExitOk;
}

int cmd_props(const CommonOptions& o, std::size_t trials, std::ostream& out, const CliHooks& hooks) {
    Loaded l = load(o);
    Prop1Config p1;
    Prop2Config p2;
    p1.seed = p2.seed = l.cfg.sweep.base_seed;
    if (o.slots) {
        p1.synthetic_slots = *o.slots;
        p2.synthetic_slots = *o.slots;
    }
    p2.trials = trials;
    p2.pcw = l.cfg.sweep.pcw;
    const PropReport r1 = prop1_suite(p1, hooks.combiner, &l.cfg, &l.res);
    const PropReport r2 = prop2_suite(p2, &l.cfg, &l.res);
    for (const auto* r : {&r1, &r2})
        out << (r->pass() ? "PASS " : "FAIL ") << r->name << ": " << r->slots << " slots, " << r->checks
            << " checks, " << r->violations << " violations, " << fixed(r->seconds, 2) << " s\n";
    return r1.pass() && r2.pass() ? kExitOk : kExitViolation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliHooks& hooks) {
    CLI::App app{"Detect-and-rollback receiver benchmark", "drsim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", build_version());

    CommonOptions list_o, run_o, tau_o, pcw_o, lat_o, props_o;
    auto* list = app.add_subcommand("list-scenarios", "Print the scenario registry");
    add_config(list, list_o);

    auto* run = app.add_subcommand("run", "Run SNR sweeps and write results.csv, summary.csv, manifest.json");
    add_common(run, run_o);
    run->add_option("--scenario", run_o.scenarios, "Comma-separated scenario ids (default: all)")->delimiter(',');

    std::vector<double> taus = default_taus();
    auto* tau = app.add_subcommand("tau-sweep", "Re-evaluate R5 over several thresholds on cached slots");
    add_common(tau, tau_o);
    tau->add_option("--scenario", tau_o.scenarios, "Comma-separated scenario ids (default: 13,10)")->delimiter(',');
    tau->add_option("--taus", taus, "Comma-separated thresholds")->delimiter(',')->capture_default_str();

    auto* pcw = app.add_subcommand("pcw", "Confidently-wrong fraction of R3 versus SNR");
    add_common(pcw, pcw_o);
    pcw->add_option("--scenario", pcw_o.scenarios, "Comma-separated scenario ids (default: 13,1)")->delimiter(',');

    LatencyConfig lc;
    auto* lat = app.add_subcommand("latency", "Per-component latency on one fixed slot");
    add_common(lat, lat_o);
    lat->add_option("--scenario", lat_o.scenarios, "Scenario id (default: 1)")->expected(1);
    lat->add_option("--reps", lc.reps, "Timed repetitions")->capture_default_str()->check(CLI::PositiveNumber);
    lat->add_option("--warmup", lc.warmup, "Discarded warmup repetitions")->capture_default_str();

    std::size_t trials = 1000;
    auto* props = app.add_subcommand("props", "Run the bounded-output and bounded-residual property suites");
    add_common(props, props_o);
    props->add_option("--trials", trials, "Residual trials per slot")->capture_default_str()->check(
        CLI::PositiveNumber);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (list->parsed()) return cmd_list(list_o, out);
        if (run->parsed()) return cmd_run(run_o, out, err, hooks);
        if (tau->parsed()) return cmd_tau(tau_o, taus, out, hooks);
        if (pcw->parsed()) return cmd_pcw(pcw_o, out);
        if (lat->parsed()) return cmd_latency(lat_o, lc, out);
        if (props->parsed()) return cmd_props(props_o, trials, out, hooks);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitViolation;
    }
    return kExitConfig;
}

}  // namespace drsim
