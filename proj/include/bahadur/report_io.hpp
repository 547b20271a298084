#pragma once

#include "bahadur/config.hpp"
#include "bahadur/experiments.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace bahadur {

inline constexpr const char* kVersion = "0.1.0";

/// Raw replicate rows, one per statistic, in the fixed column order
/// experiment_id,process_kind,n,replicate,seed,p,xi_np,linear_term,
/// correction_term,remainder_srd,remainder_lrd,statistic_name,statistic_value.
std::string raw_csv(const std::vector<RawRow>& rows);
void write_raw_csv(const std::vector<RawRow>& rows, const std::filesystem::path& path);
std::vector<RawRow> parse_raw_csv(const std::string& text);
std::vector<RawRow> read_raw_csv(const std::filesystem::path& path);

nlohmann::json to_json(const RateReport& report);
nlohmann::json to_json(const DistributionReport& report);
nlohmann::json to_json(const GmcReport& report);

/// Full report: experiment_id, config echo, per_n/slope of the primary
/// series, every series, warnings, facts, failure counts.
nlohmann::json report_json(const ExperimentResult& result, const ExperimentConfig& config);

/// {section: {key: value}} and back.
nlohmann::json config_echo(const ExperimentConfig& config);
ExperimentConfig config_from_echo(const nlohmann::json& echo);

/// 16 hex digits of FNV-1a over the canonical INI text.
std::string config_hash(const ExperimentConfig& config);

struct RunManifest {
    std::string config_hash;
    std::string version = kVersion;
    std::string started;
    std::string finished;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    bool partial = false;
    std::int64_t failures = 0;
};

nlohmann::json to_json(const RunManifest& manifest);

/// UTC, ISO 8601.
std::string utc_timestamp();

/// Writes text with LF line endings, replacing the file.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bahadur
