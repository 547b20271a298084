#pragma once

#include "bahadur/coefficients.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

namespace bahadur {

enum class RateKind {
    ell_q,           // (log log n)^{1/2} for q > 2; (log n)^{3/2} log log n for q = 2
    iota_q,          // (log n)^{1/q}(log log n)^{2/q} for q > 2; (log n)^{3/2} log log n for q = 2
    psi,             // sqrt(n) sum_{k=1}^n k^{1/2-2beta} L^2(k)
    sigma_n1_asym,   // sigma_{n,1}, from C_beta n^{3-2beta} L^2(n) / ((1-beta)(3-2beta))
    sigma_n1_exact,  // sigma_{n,1} = ||n Xbar_n||, finite sums over the filter
    A_beta,          // Psi_n^2 (log n)^{1 or 3} (log log n)^2
    b_thm3,          // sigma_{n,1} (log n)^{1/2} log log n / n, with sigma_{n,1} exact
    c_beta,          // sigma_eps^2 * int_0^inf x^-beta (1+x)^-beta dx
    lrd_exponent,    // max(-beta/2 - 1/4, 3/2 - 3 beta)
    kiefer_scale,    // n^{-3/4} (log log n)^{3/4}
};

std::string_view to_string(RateKind kind);
RateKind rate_kind_from_string(std::string_view name);

struct RateParams {
    double q = 2.0;
    double beta = std::numeric_limits<double>::quiet_NaN();
    SlowlyVarying L = SlowlyVarying::constant();
    double innovation_variance = 1.0;
    double alpha_moment = std::numeric_limits<double>::infinity();
    /// Truncate the filter at this lag in sigma_n1_exact (and b_thm3).
    std::optional<std::int64_t> truncation_lag;
};

/// Smallest n accepted by the n-dependent kinds; below it log log n <= 0.
inline constexpr std::int64_t kMinRateN = 16;

/// Throws DomainError for n < 16 on kinds that depend on n, and for the
/// sigma kinds when alpha_moment < 2.
double rate_function(RateKind kind, std::int64_t n, const RateParams& params);

double c_beta(double beta, double innovation_variance = 1.0);
double lrd_exponent(double beta);

/// Var(X_1 + ... + X_n) for X_k = sum_i a_i eps_{k-i}, optionally with a_i = 0
/// beyond `truncation_lag`.
double partial_sum_variance(const CoefficientSchedule& schedule, double innovation_variance, std::int64_t n,
                            std::optional<std::int64_t> truncation_lag = std::nullopt);

}  // namespace bahadur
