#include "bahadur/statistics.hpp"

#include "bahadur/errors.hpp"
#include "bahadur/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bahadur {

DistReport summarize_distribution(const Eigen::VectorXd& values) {
    DistReport r;
    r.count = values.size();
    if (r.count < 1) throw InvalidParameter("summarize_distribution needs at least one value");
    const double n = static_cast<double>(r.count);
    r.mean = values.mean();
    const Eigen::ArrayXd d = values.array() - r.mean;
    const double m2 = d.square().mean();
    const double m3 = d.cube().mean();
    const double m4 = d.square().square().mean();
    r.variance = r.count > 1 ? m2 * n / (n - 1.0) : 0.0;
    if (!(m2 > 0.0)) {
        r.variance = 0.0;
        r.moments_defined = false;
        r.skewness = r.excess_kurtosis = r.normality = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    r.skewness = m3 / std::pow(m2, 1.5);
    r.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    r.normality = n / 6.0 * (r.skewness * r.skewness + 0.25 * r.excess_kurtosis * r.excess_kurtosis);
    return r;
}

double quantile_type7(Eigen::VectorXd values, double p) {
    if (values.size() == 0) throw InvalidParameter("quantile of an empty set");
    std::sort(values.data(), values.data() + values.size());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<Eigen::Index>(std::floor(h));
    const Eigen::Index hi = std::min<Eigen::Index>(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(const Eigen::VectorXd& values) { return quantile_type7(values, 0.5); }

Summary summarize(const Eigen::VectorXd& values) {
    Summary s;
    s.count = values.size();
    if (s.count == 0) return s;
    Eigen::VectorXd v = values;
    std::sort(v.data(), v.data() + v.size());
    s.median = quantile_type7(v, 0.5);
    s.q25 = quantile_type7(v, 0.25);
    s.q75 = quantile_type7(v, 0.75);
    s.mean = v.mean();
    return s;
}

SlopeFit fit_loglog_slope(const Eigen::VectorXd& n, const Eigen::VectorXd& statistic) {
    if (n.size() != statistic.size()) throw InvalidParameter("fit_loglog_slope: length mismatch");
    if (n.size() < 4) throw InvalidParameter("fit_loglog_slope needs at least 4 points");
    if ((statistic.array() <= 0.0).any() || !statistic.allFinite()) {
        throw NonPositiveStatistic("log-log fit needs every statistic > 0");
    }
    if ((n.array() <= 0.0).any()) throw InvalidParameter("log-log fit needs n > 0");
    const Eigen::ArrayXd x = n.array().log();
    const Eigen::ArrayXd y = statistic.array().log();
    const double xb = x.mean(), yb = y.mean();
    const double sxx = (x - xb).square().sum();
    SlopeFit fit;
    fit.slope = ((x - xb) * (y - yb)).sum() / sxx;
    fit.intercept = yb - fit.slope * xb;
    if (n.size() > 2) {
        const double rss = (y - fit.intercept - fit.slope * x).square().sum();
        fit.stderr_ols = std::sqrt(rss / static_cast<double>(n.size() - 2) / sxx);
    }
    return fit;
}

double bootstrap_slope_stderr(const Eigen::VectorXd& n, const std::vector<Eigen::VectorXd>& replicates,
                              int resamples, std::uint64_t seed) {
    if (static_cast<std::size_t>(n.size()) != replicates.size()) {
        throw InvalidParameter("bootstrap: one replicate set per n");
    }
    if (resamples < 2 || n.size() < 4) return 0.0;
    RandomStream stream(seed);
    Eigen::VectorXd slopes(resamples);
    Eigen::VectorXd stat(n.size());
    for (int b = 0; b < resamples; ++b) {
        for (Eigen::Index i = 0; i < n.size(); ++i) {
            const auto& r = replicates[static_cast<std::size_t>(i)];
            Eigen::VectorXd draw(r.size());
            for (Eigen::Index k = 0; k < r.size(); ++k) {
                draw[k] = r[static_cast<Eigen::Index>(stream.uniform() * static_cast<double>(r.size()))];
            }
            stat[i] = median(draw);
        }
        slopes[b] = (stat.array() > 0.0).all() ? fit_loglog_slope(n, stat).slope
                                               : std::numeric_limits<double>::quiet_NaN();
    }
    const double mean = slopes.mean();
    return std::sqrt((slopes.array() - mean).square().sum() / (resamples - 1));
}

}  // namespace bahadur
