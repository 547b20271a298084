#pragma once

#include "bahadur/config.hpp"
#include "bahadur/nonlinear_process.hpp"
#include "bahadur/statistics.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bahadur {

/// Stateless seed for replicate `replicate` of `experiment_id`. For a fixed
/// (base, id) distinct replicate indices always give distinct seeds.
std::uint64_t derive_seed(std::uint64_t base, std::string_view experiment_id, std::uint64_t replicate);

/// One line of the raw replicate CSV.
struct RawRow {
    std::string experiment_id;
    std::string process_kind;
    std::int64_t n = 0;
    std::int64_t replicate = 0;
    std::uint64_t seed = 0;
    double p = std::numeric_limits<double>::quiet_NaN();
    double xi_np = std::numeric_limits<double>::quiet_NaN();
    double linear_term = std::numeric_limits<double>::quiet_NaN();
    double correction_term = std::numeric_limits<double>::quiet_NaN();
    double remainder_srd = std::numeric_limits<double>::quiet_NaN();
    double remainder_lrd = std::numeric_limits<double>::quiet_NaN();
    std::string statistic_name;
    double statistic_value = std::numeric_limits<double>::quiet_NaN();
};

struct PerN {
    std::int64_t n = 0;
    Summary summary;
};

/// Per-n summaries of one statistic and the log-log fit of its medians.
struct Series {
    std::string statistic_name;
    std::vector<PerN> per_n;
    std::optional<double> slope;
    std::optional<double> intercept;
    std::optional<double> slope_stderr;
    std::optional<double> theoretical_exponent;
};

struct RateReport {
    std::string experiment_id;
    std::vector<Series> series;  // series[0] is the primary statistic

    const Series& primary() const { return series.front(); }
    const Series* find(std::string_view statistic) const;
};

struct DistSeries {
    std::string statistic_name;
    DistReport dist;
};

struct DistributionReport {
    std::string experiment_id;
    std::vector<DistSeries> series;

    const DistReport* find(std::string_view statistic) const;
};

/// How raw rows are folded into a RateReport. The primary statistic comes
/// first; bootstrap seeds derive from `base_seed`.
struct RateSpec {
    std::string experiment_id;
    std::uint64_t base_seed = 0;
    std::vector<std::string> statistics;
    std::map<std::string, double> theoretical_exponents;
    int bootstrap_resamples = 200;
};

struct ExperimentResult {
    std::string kind;  // rate, uniform-rate, oscillation, dichotomy, trimmed-clt, gmc
    std::string experiment_id;
    std::vector<RawRow> rows;
    std::optional<RateReport> rate;
    std::optional<DistributionReport> dist;
    std::optional<GmcReport> gmc;
    std::map<std::string, double> facts;  // oracle precision, f(x), targets, truncation lag, ...
    std::vector<std::string> warnings;
    std::int64_t failures = 0;
    std::int64_t attempted = 0;
    // How `rows` were folded, kept so reports can be rebuilt from a raw CSV.
    std::optional<RateSpec> rate_spec;
    std::vector<std::string> dist_statistics;
};

struct RunOptions {
    int jobs = 1;
    /// Execute replicates in a permuted order; the result must not change.
    std::optional<std::uint64_t> shuffle_seed;
    std::function<void(const std::string&)> progress;
};

RateReport aggregate_rate(const std::vector<RawRow>& rows, const RateSpec& spec);
DistributionReport aggregate_distribution(const std::vector<RawRow>& rows, const std::string& experiment_id,
                                          const std::vector<std::string>& statistics);

/// Recomputes result.rate / result.dist from result.rows.
void reaggregate(ExperimentResult& result);

/// Pointwise Bahadur remainders over the n-grid; statistics abs_remainder_srd
/// and abs_remainder_lrd, primary per `corrected`.
ExperimentResult run_rate_experiment(const ExperimentConfig& config, const RunOptions& options = {});
/// sup over [p0, p1] of the remainder; statistic uniform_remainder_srd|lrd.
ExperimentResult run_uniform_experiment(const ExperimentConfig& config, const RunOptions& options = {});
/// sup_{|u| <= b_n} of the F_n - F and M_n increments at x = xi_{center_level}.
ExperimentResult run_oscillation_experiment(const ExperimentConfig& config, const RunOptions& options = {});
/// Normalized S_n(x + delta_n; 1) - S_n(x; 1) at x = xi_{x_level}, single n.
ExperimentResult run_dichotomy_experiment(const ExperimentConfig& config, const RunOptions& options = {});
/// sqrt(n) (T_n - mu_target) for the trimmed or Winsorized mean, single n.
ExperimentResult run_trimmed_clt_experiment(const ExperimentConfig& config, const RunOptions& options = {});
/// Geometric-moment contraction of an iterated process.
ExperimentResult run_gmc_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Dispatch by subcommand name.
/// Serves large buffers from mmap so long runs return them to the system
/// instead of fragmenting the heap. No-op outside glibc. Call once from main.
void use_mapped_large_buffers();

ExperimentResult run_experiment(const std::string& kind, const ExperimentConfig& config,
                                const RunOptions& options = {});

}  // namespace bahadur
