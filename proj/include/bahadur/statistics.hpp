#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace bahadur {

/// Moment summary of replicate values.
struct DistReport {
    double mean = 0.0;
    double variance = 0.0;         // unbiased
    double skewness = 0.0;         // m3 / m2^{3/2}
    double excess_kurtosis = 0.0;  // m4 / m2^2 - 3
    double normality = 0.0;        // Jarque-Bera: n/6 (skew^2 + exkurt^2 / 4)
    std::int64_t count = 0;
    bool moments_defined = true;  // false for constant input; skew/kurtosis then NaN
};

DistReport summarize_distribution(const Eigen::VectorXd& values);

/// Linear interpolation between order statistics (type 7).
double quantile_type7(Eigen::VectorXd values, double p);
double median(const Eigen::VectorXd& values);

struct Summary {
    double median = 0.0;
    double mean = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    std::int64_t count = 0;
};

Summary summarize(const Eigen::VectorXd& values);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_ols = 0.0;  // from the regression residuals
};

/// Least squares of log(statistic) on log(n). Needs >= 4 points and every
/// statistic > 0 (else NonPositiveStatistic).
SlopeFit fit_loglog_slope(const Eigen::VectorXd& n, const Eigen::VectorXd& statistic);

/// Standard deviation of the fitted slope of log median over bootstrap
/// resamples of each n's replicates.
double bootstrap_slope_stderr(const Eigen::VectorXd& n, const std::vector<Eigen::VectorXd>& replicates,
                              int resamples, std::uint64_t seed);

}  // namespace bahadur
