#pragma once

#include "bahadur/innovations.hpp"
#include "bahadur/marginal.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace bahadur {

struct LinearProcessPath;

/// X_1..X_n in original and sorted order, with the optional one-step-ahead
/// locations X_{i,i-1} needed by the conditional empirical CDF.
class EmpiricalSample {
public:
    explicit EmpiricalSample(Eigen::VectorXd values, std::optional<Eigen::VectorXd> lagged_locations = std::nullopt);
    static EmpiricalSample from_path(const LinearProcessPath& path);

    Eigen::Index size() const noexcept { return values_.size(); }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    const Eigen::VectorXd& sorted() const noexcept { return sorted_; }
    bool has_lags() const noexcept { return lags_.has_value(); }
    /// Throws MissingLags when absent.
    const Eigen::VectorXd& lagged_locations() const;
    double mean() const noexcept { return mean_; }

    /// X_(k), 1-based.
    double order_statistic(Eigen::Index k) const;

private:
    Eigen::VectorXd values_;
    Eigen::VectorXd sorted_;
    std::optional<Eigen::VectorXd> lags_;
    double mean_ = 0.0;
};

/// F_n(x) = #{X_i <= x} / n.
double ecdf_eval(const EmpiricalSample& sample, double x);
/// #{X_i < x} / n, the left limit F_n(x-).
double ecdf_left(const EmpiricalSample& sample, double x);

/// inf{x : F_n(x) >= p} = X_(ceil(n p)). Values of n p within 1e-9 of an
/// integer are rounded first so p = k/n selects X_(k).
double sample_quantile(const EmpiricalSample& sample, double p);
Eigen::Index quantile_rank(Eigen::Index n, double p);

/// F_n*(x) = mean F_eps(x - X_{i,i-1}), and its first two derivatives.
double conditional_cdf(const EmpiricalSample& sample, const InnovationModel& innovation, double x);
double conditional_density(const EmpiricalSample& sample, const InnovationModel& innovation, double x);
double conditional_density_deriv(const EmpiricalSample& sample, const InnovationModel& innovation, double x);

/// F_n - F = M_n + N_n with M_n = F_n - F_n* and N_n = F_n* - F.
struct Decomposition {
    double martingale = 0.0;
    double smooth = 0.0;
};

Decomposition decompose(const EmpiricalSample& sample, const InnovationModel& innovation,
                        const MarginalDistribution& F, double x);

/// sup over [l, u] of |F_n - F|: evaluated on a uniform grid plus every jump
/// of F_n in the interval, from both sides.
double sup_deviation(const EmpiricalSample& sample, const MarginalDistribution& F, double l, double u,
                     int grid_size);

/// sup_{|u| <= b} |D(x + u) - D(x)| on a symmetric grid plus `extra_points`
/// (absolute abscissae inside the window).
double oscillation_modulus(const std::function<double(double)>& D, double x, double b, int grid_size,
                           const std::vector<double>& extra_points = {});

/// Same for D = F_n - G with G continuous; the jumps of F_n in the window
/// are visited from both sides, so the sup is exact up to G's variation
/// between grid points.
double step_oscillation_modulus(const EmpiricalSample& sample, const std::function<double(double)>& G, double x,
                                double b, int grid_size);

/// alpha(n) = floor(n p0), beta(n) = floor(n p1).
/// trimmed = sum_{i=alpha+1}^{beta} X_(i) / (beta - alpha).
double trimmed_mean(const EmpiricalSample& sample, double p0, double p1);

enum class WinsorVariant {
    display,  // n^-1 [alpha X_(alpha) + (n - beta) X_(beta) + sum_{alpha+1}^{beta} X_(i)]
    shifted,  // upper boundary X_(beta+1) in place of X_(beta)
};

double winsorized_mean(const EmpiricalSample& sample, double p0, double p1,
                       WinsorVariant variant = WinsorVariant::display);

/// Single column CSV with header "x".
void write_sample_csv(const EmpiricalSample& sample, const std::filesystem::path& path);
EmpiricalSample read_sample_csv(const std::filesystem::path& path);

}  // namespace bahadur
