#pragma once

#include "bahadur/coefficients.hpp"
#include "bahadur/innovations.hpp"
#include "bahadur/linear_process.hpp"
#include "bahadur/nonlinear_process.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bahadur {

/// One documented config key.
struct ConfigKey {
    std::string section;
    std::string key;
    std::string default_value;
    std::string help;
};

/// Every accepted key with its default, in canonical order.
const std::vector<ConfigKey>& config_schema();

/// Flat INI-style configuration with sections [process], [innovation],
/// [experiment], [output]. Values are stored canonically as text, so two
/// configs compare equal exactly when every field does.
class ExperimentConfig {
public:
    /// All defaults.
    ExperimentConfig();

    static ExperimentConfig parse(const std::string& text, const std::string& origin = "<string>");
    static ExperimentConfig load(const std::filesystem::path& path);

    /// `section.key=value`. Throws ConfigError for unknown keys.
    void set(const std::string& assignment);
    void set(const std::string& section, const std::string& key, const std::string& value);

    /// Checks every field; throws ConfigError naming the field.
    void validate() const;

    const std::string& raw(const std::string& section, const std::string& key) const;
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    /// Canonical INI text; parse(to_ini()) == *this.
    std::string to_ini() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

    // Typed accessors (valid after validate()).
    std::string experiment_id() const;
    bool iterated() const;
    InnovationModel innovation() const;
    CoefficientSchedule schedule() const;
    IteratedMapModel map_model() const;
    double truncation_tolerance() const;
    std::int64_t max_lag() const;
    FarPast far_past() const;

    std::vector<std::int64_t> n_grid() const;
    std::int64_t n() const;
    std::int64_t replicates() const;
    double p() const;
    double p0() const;
    double p1() const;
    bool corrected() const;
    int grid_points() const;
    std::int64_t oracle_replicates() const;
    std::uint64_t seed() const;
    int jobs() const;
    double window_scale() const;
    double window_exponent() const;
    double center_level() const;
    double x_level() const;
    /// delta_n = n^gamma; defaults to 1/2 - beta.
    double gamma() const;
    std::string branch() const;
    std::string winsor() const;
    double alpha() const;
    std::int64_t lags() const;
    std::filesystem::path output_dir() const;
    bool write_csv() const;

    double get_double(const std::string& section, const std::string& key) const;
    std::int64_t get_int(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;

private:
    std::map<std::string, std::string> values_;  // "section.key" -> text
};

/// "1024,2048" or "2^10..2^17" (powers of two, inclusive).
std::vector<std::int64_t> parse_n_grid(const std::string& text);

}  // namespace bahadur
