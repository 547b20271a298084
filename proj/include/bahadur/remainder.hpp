#pragma once

#include "bahadur/coefficients.hpp"
#include "bahadur/empirical.hpp"
#include "bahadur/innovations.hpp"
#include "bahadur/marginal.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace bahadur {

/// Marginal quantities at one level p: xi_p, f(xi_p), f'(xi_p) and the
/// oracle's standard error there.
struct QuantilePoint {
    double p = 0.5;
    double xi = 0.0;
    double f = 0.0;
    double fprime = 0.0;
    double precision = 0.0;
};

/// Throws DensityTooSmall when f(xi_p) < 10 * precision.
QuantilePoint quantile_point(const MarginalDistribution& F, double p);

struct BahadurDecomposition {
    double p = 0.0;
    double xi_p = 0.0;
    double xi_np = 0.0;
    double f_xi = 0.0;
    double fprime_xi = 0.0;
    double mean = 0.0;             // Xbar_n
    double linear_term = 0.0;      // (p - F_n(xi_p)) / f(xi_p)
    double correction_term = 0.0;  // Xbar_n^2 f'(xi_p) / (2 f(xi_p))
    double remainder_srd = 0.0;    // xi_np - xi_p - linear_term
    double remainder_lrd = 0.0;    // remainder_srd - correction_term
    double error_bar = 0.0;        // oracle precision / f(xi_p)
    bool corrected = false;

    double value() const noexcept { return corrected ? remainder_lrd : remainder_srd; }
};

BahadurDecomposition remainder(const EmpiricalSample& sample, double p, const MarginalDistribution& F,
                               bool corrected);
BahadurDecomposition remainder(const EmpiricalSample& sample, const QuantilePoint& q, bool corrected);

/// A level p of a uniform grid. At a jump level p = k/n of the sample
/// quantile function the right limit (X_(k+1)) is evaluated as well.
struct GridPoint {
    QuantilePoint q;
    bool jump = false;
};

struct UniformRemainder {
    double sup = 0.0;
    double argmax_p = 0.0;
};

UniformRemainder uniform_remainder(const EmpiricalSample& sample, const std::vector<double>& p_grid,
                                   const MarginalDistribution& F, bool corrected);
UniformRemainder uniform_remainder(const EmpiricalSample& sample, const std::vector<GridPoint>& grid, bool corrected);

/// max(points, ceil(sqrt n)) equally spaced levels on [p0, p1] together with
/// every k/n inside the range, marked as jumps.
std::vector<GridPoint> uniform_grid(const MarginalDistribution& F, std::int64_t n, double p0, double p1, int points);

/// 2^{5/4} 3^{-3/4} sqrt(p (1 - p)) / f.
double kiefer_limit(double p, double f_at_quantile);

/// S_n(y;1) = n[F_n(y) - F(y) + f(y) Xbar_n], H_n(y) = n[F_n*(y) - F(y) + f(y) Xbar_n].
struct Expansion {
    double S = 0.0;
    double H = 0.0;
    double nM = 0.0;  // n [F_n(y) - F_n*(y)]
};

Expansion expansion_remainder(const EmpiricalSample& sample, const InnovationModel& innovation,
                              const MarginalDistribution& F, double y);

enum class IncrementBranch { gaussian, rosenblatt, automatic };

std::string_view to_string(IncrementBranch branch);
IncrementBranch increment_branch_from_string(std::string_view name);

/// Distance of 4 beta - 3 from gamma below which automatic selection refuses.
inline constexpr double kBranchMargin = 0.02;

/// gaussian if 4 beta - 3 > gamma, rosenblatt otherwise; throws
/// BoundaryRefusal within kBranchMargin of the boundary.
IncrementBranch select_branch(double beta, double gamma);

struct Increment {
    double raw = 0.0;         // S_n(x + delta; 1) - S_n(x; 1)
    double normalized = 0.0;  // raw / sqrt(n delta) or raw / (sigma_{n,2} delta)
    IncrementBranch branch = IncrementBranch::gaussian;
};

struct IncrementParams {
    IncrementBranch branch = IncrementBranch::automatic;
    double beta = 0.75;
    SlowlyVarying L = SlowlyVarying::constant();
    /// delta_n = n^gamma; only consulted for automatic branch selection.
    double gamma = -0.25;
};

/// Raw increment only; no normalization.
double raw_increment(const EmpiricalSample& sample, const MarginalDistribution& F, double x, double delta);

Increment increment_statistic(const EmpiricalSample& sample, const MarginalDistribution& F, double x, double delta,
                              const IncrementParams& params);

}  // namespace bahadur
