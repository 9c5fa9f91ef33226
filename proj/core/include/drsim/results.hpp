// SPDX-FileCopyrightText: Copyright (c) 2026 The drsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drsim/bench.hpp"

namespace drsim {

/// One CSV line. Optional fields are written as empty cells.
struct ResultRow {
    int scenario_id = 0;
    std::string scenario_name;
    std::string receiver;
    double snr_db = 0.0;
    std::size_t slots = 0;
    double bler = 0.0;
    double coded_ber = 0.0;
    std::optional<double> rollback_rate;
    std::optional<double> forced_rollback_rate;
    std::optional<double> mean_d;
    std::optional<double> mean_confidence_fraction;
    std::optional<double> pcw;

    bool operator==(const ResultRow&) const = default;
};

const std::vector<std::string>& result_columns();

std::vector<ResultRow> to_rows(std::span<const SnrPointResult> points);

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows);
std::vector<ResultRow> parse_results_csv(std::istream& in);

void write_results(const std::filesystem::path& csv_path, std::span<const ResultRow> rows);
std::vector<ResultRow> read_results(const std::filesystem::path& csv_path);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Config echo, seeds, code parameters and build version. Contains nothing
/// that depends on wall time or worker count.
nlohmann::json make_manifest(const BenchConfig& cfg, const BenchResources& res, const SweepConfig& sweep,
                             std::span<const Scenario> scenarios);

nlohmann::json to_json(const Scenario& s);
nlohmann::json to_json(const SweepConfig& s);
nlohmann::json to_json(const SurrogateMode& m);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Simple CSV writer for auxiliary tables (tau sweep, p_cw, latency).
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

}  // namespace drsim
