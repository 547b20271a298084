#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>

namespace testing {

// Kolmogorov-Smirnov distance of a sample against a continuous cdf.
inline double ks_distance(Eigen::VectorXd x, const std::function<double(double)>& cdf) {
    std::sort(x.data(), x.data() + x.size());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double F = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
    }
    return d;
}

// Two-sample KS distance.
inline double ks_two_sample(Eigen::VectorXd a, Eigen::VectorXd b) {
    std::sort(a.data(), a.data() + a.size());
    std::sort(b.data(), b.data() + b.size());
    Eigen::Index i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

// Critical KS value at alpha = 0.01.
inline double ks_critical(double n) { return 1.63 / std::sqrt(n); }
inline double ks_critical(double n, double m) { return 1.63 * std::sqrt((n + m) / (n * m)); }

}  // namespace testing
