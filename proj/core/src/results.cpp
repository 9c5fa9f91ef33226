// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "drsim/results.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace drsim {

const std::vector<std::string>& result_columns() {
    static const std::vector<std::string> cols{
        "scenario_id", "scenario_name", "receiver", "snr_db", "slots", "bler", "coded_ber",
        "rollback_rate", "forced_rollback_rate", "mean_d", "mean_confidence_fraction", "pcw"};
    return cols;
}

std::vector<ResultRow> to_rows(std::span<const SnrPointResult> points) {
    std::vector<ResultRow> rows;
    for (const auto& p : points) {
        for (const auto& r : p.receivers) {
            ResultRow row;
            row.scenario_id = p.scenario_id;
            row.scenario_name = p.scenario_name;
            row.receiver = to_string(r.receiver);
            row.snr_db = p.snr_db;
            row.slots = r.slots;
            row.bler = r.bler;
            row.coded_ber = r.coded_ber;
            row.rollback_rate = r.rollback_rate;
            row.forced_rollback_rate = r.forced_rollback_rate;
            row.mean_d = r.mean_d;
            row.mean_confidence_fraction = r.mean_confidence_fraction;
            row.pcw = r.pcw;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", line_no);
    cells.push_back(std::move(cur));
    return cells;
}

double parse_double(const std::string& s, const std::string& column, std::size_t line_no) {
    if (s.empty()) throw ParseError("empty value in column '" + column + "'", line_no);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ParseError("bad number '" + s + "' in column '" + column + "'", line_no);
    return v;
}

std::optional<double> parse_opt(const std::string& s, const std::string& column, std::size_t line_no) {
    if (s.empty()) return std::nullopt;
    return parse_double(s, column, line_no);
}

template <class Int>
Int parse_int(const std::string& s, const std::string& column, std::size_t line_no) {
    Int v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
        throw ParseError("bad integer '" + s + "' in column '" + column + "'", line_no);
    return v;
}

}  // namespace

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows) {
    const auto& cols = result_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : rows) {
        out << r.scenario_id << ',' << quote(r.scenario_name) << ',' << quote(r.receiver) << ','
            << format_double(r.snr_db) << ',' << r.slots << ',' << format_double(r.bler) << ','
            << format_double(r.coded_ber) << ',' << opt(r.rollback_rate) << ',' << opt(r.forced_rollback_rate) << ','
            << opt(r.mean_d) << ',' << opt(r.mean_confidence_fraction) << ',' << opt(r.pcw) << '\n';
    }
}

std::vector<ResultRow> parse_results_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty results file", 0);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line, line_no);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!index.emplace(header[i], i).second) throw ParseError("duplicate column '" + header[i] + "'", line_no);
    }
    for (const auto& c : result_columns())
        if (!index.count(c)) throw ParseError("missing column '" + c + "'", line_no);
    for (const auto& h : header)
        if (std::find(result_columns().begin(), result_columns().end(), h) == result_columns().end())
            throw ParseError("unexpected column '" + h + "'", line_no);

    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line, line_no);
        if (cells.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(cells.size()),
                             line_no);
        auto cell = [&](const char* c) -> const std::string& { return cells[index.at(c)]; };
        ResultRow r;
        r.scenario_id = parse_int<int>(cell("scenario_id"), "scenario_id", line_no);
        r.scenario_name = cell("scenario_name");
        r.receiver = cell("receiver");
        if (r.receiver.empty()) throw ParseError("empty value in column 'receiver'", line_no);
        r.snr_db = parse_double(cell("snr_db"), "snr_db", line_no);
        r.slots = parse_int<std::size_t>(cell("slots"), "slots", line_no);
        r.bler = parse_double(cell("bler"), "bler", line_no);
        r.coded_ber = parse_double(cell("coded_ber"), "coded_ber", line_no);
        r.rollback_rate = parse_opt(cell("rollback_rate"), "rollback_rate", line_no);
        r.forced_rollback_rate = parse_opt(cell("forced_rollback_rate"), "forced_rollback_rate", line_no);
        r.mean_d = parse_opt(cell("mean_d"), "mean_d", line_no);
        r.mean_confidence_fraction = parse_opt(cell("mean_confidence_fraction"), "mean_confidence_fraction", line_no);
        r.pcw = parse_opt(cell("pcw"), "pcw", line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_results(const std::filesystem::path& csv_path, std::span<const ResultRow> rows) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + csv_path.string() + "'");
    write_results_csv(out, rows);
    if (!out) throw ConfigError("write failed for '" + csv_path.string() + "'");
}

std::vector<ResultRow> read_results(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + csv_path.string() + "'", 0);
    return parse_results_csv(in);
}

nlohmann::json to_json(const SurrogateMode& m) {
    nlohmann::json j;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, GenieBoost>) {
                j = {{"type", "genie_boost"}, {"alpha", v.alpha}};
            } else if constexpr (std::is_same_v<T, SilentFailure>) {
                j = {{"type", "silent_failure"},
                     {"p_wrong", v.p_wrong},
                     {"magnitude_source", v.source == MagnitudeSource::Profile ? "profile" : "slot"},
                     {"genie_alpha", v.genie_alpha},
                     {"confident_fraction", v.confident_fraction}};
            } else if constexpr (std::is_same_v<T, Miscalibrated>) {
                j = {{"type", "miscalibrated"}, {"scale", v.scale}, {"extra_noise", v.extra_noise}};
            } else {
                j = {{"type", "hard_failure"}};
            }
        },
        m);
    return j;
}

nlohmann::json to_json(const Scenario& s) {
    return {{"id", s.id},
            {"name", s.name},
            {"axis", s.axis},
            {"value", s.value},
            {"channel", s.channel},
            {"tap_profile", s.tap_profile},
            {"doppler_hz", s.doppler_hz},
            {"delay_spread_s", s.delay_spread_s},
            {"modulation", to_string(s.modulation)},
            {"dmrs_additional_positions", s.dmrs_additional_positions},
            {"r1_time_interpolation", to_string(s.r1_time_interpolation)},
            {"surrogate_mode", to_json(s.surrogate_mode)}};
}

nlohmann::json to_json(const SweepConfig& s) {
    nlohmann::json rx = nlohmann::json::array();
    for (auto r : s.receivers) rx.push_back(to_string(r));
    return {{"snr_db", s.snr_db},
            {"slots_per_point", s.slots_per_point},
            {"base_seed", s.base_seed},
            {"receivers", rx},
            {"tau", s.detector.tau},
            {"vote_threshold", s.detector.vote_threshold},
            {"delta_max", s.pcw.delta_max},
            {"residual_witness_period", s.residual_witness_period},
            {"residual_witness_trials", s.residual_witness_trials}};
}

nlohmann::json make_manifest(const BenchConfig& cfg, const BenchResources& res, const SweepConfig& sweep,
                             std::span<const Scenario> scenarios) {
    nlohmann::json sc = nlohmann::json::array();
    nlohmann::json codes = nlohmann::json::array();
    for (const auto& s : scenarios) {
        sc.push_back(to_json(s));
        const auto layout = make_slot_layout(s.slot_config());
        const auto code = LdpcCode::for_length(res.base_matrix, layout->n_coded_bits(), cfg.code.max_iterations,
                                               cfg.code.min_sum_scale);
        codes.push_back({{"scenario_id", s.id},
                         {"n", code.n()},
                         {"k", code.k()},
                         {"lifting", code.lifting()},
                         {"rate", code.rate()}});
    }
    return {{"tool", "drsim"},
            {"version", build_version()},
            {"config_file", cfg.source.filename().string()},
            {"base_seed", sweep.base_seed},
            {"sweep", to_json(sweep)},
            {"code",
             {{"base_matrix", cfg.code.base_matrix_file},
              {"base_rows", res.base_matrix.rows},
              {"base_cols", res.base_matrix.cols},
              {"max_iterations", cfg.code.max_iterations},
              {"min_sum_scale", cfg.code.min_sum_scale},
              {"per_scenario", codes}}},
            {"channel",
             {{"tap_table", cfg.tap_table_file},
              {"scatterers", cfg.channel.scatterers},
              {"k_factor_db", cfg.channel.k_factor_db},
              {"subcarrier_spacing_hz", cfg.channel.subcarrier_spacing_hz}}},
            {"magnitude_profile", {{"slots", cfg.magnitude_profile.slots}, {"alpha", cfg.magnitude_profile.alpha}}},
            {"scenarios", sc}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << quote(header[i]);
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << quote(r[i]);
        out << '\n';
    }
}

}  // namespace drsim
