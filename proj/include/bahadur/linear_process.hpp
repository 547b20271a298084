#pragma once

#include "bahadur/coefficients.hpp"
#include "bahadur/innovations.hpp"
#include "bahadur/marginal.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <string_view>

namespace bahadur {

namespace detail {
class FftFilter;
}

inline constexpr std::int64_t kDefaultMaxLag = std::int64_t{1} << 21;

/// How the lags beyond M enter a simulated path.
///
///   none      dropped: X_k = sum_{i=0}^{M} a_i eps_{k-i}
///   gaussian  sum_{i>M} a_i eps_{k-i} is added back. Recorded innovations
///             enter exactly; older ones through a Gaussian vector with the
///             exact covariance, interpolated across k. Long-memory
///             schedules with centered finite-variance innovations only.
enum class FarPast { none, gaussian };

std::string_view to_string(FarPast mode);
FarPast far_past_from_string(std::string_view name);

/// Truncation lag M of the moving-average filter and what it achieves.
struct Truncation {
    std::int64_t lag = 0;
    /// SRD: sum_{i>M} |a_i| times the innovation scale. LRD: |a_M|.
    double achieved = 0.0;
    bool met = true;
    FarPast far_past = FarPast::none;
};

/// sum_{m>=0} a(M + u + m) a(M + v + m) for real u, v >= 1 and a long-memory
/// schedule; u = v = 1 gives sum_{i>M} a_i^2.
double far_past_covariance(const CoefficientSchedule& schedule, std::int64_t lag, double u, double v);

/// SRD: smallest M with sum_{i>M}|a_i| * scale < tolerance. LRD: M >= n
/// and |a_M| < tolerance, capped at max_lag (then `met` is false).
Truncation choose_truncation(const CoefficientSchedule& schedule, const InnovationModel& innovation, std::int64_t n,
                             double tolerance, std::int64_t max_lag = kDefaultMaxLag);

/// X_1..X_n of X_k = sum_{i=0}^{M} a_i eps_{k-i}, plus the far past when
/// the truncation asks for it.
///
/// `innovations` holds eps_{1-M} .. eps_n; its last n entries are the
/// current-time shocks. values = lagged_locations + current shocks, with
/// the addition done in that order so the identity is exact.
struct LinearProcessPath {
    Eigen::VectorXd values;
    Eigen::VectorXd lagged_locations;  // X_{i,i-1} = sum_{j>=1} a_j eps_{i-j}
    Eigen::VectorXd innovations;
    Truncation truncation;
    std::uint64_t seed = 0;

    Eigen::Index size() const noexcept { return values.size(); }
    auto current_innovations() const { return innovations.tail(values.size()); }
};

/// Reusable simulator for a fixed (schedule, innovation, n, M). Holds the
/// filter spectrum when FFT convolution is used; const and thread-safe.
class LinearProcessSimulator {
public:
    LinearProcessSimulator(CoefficientSchedule schedule, InnovationModel innovation, std::int64_t n,
                           Truncation truncation);
    ~LinearProcessSimulator();
    LinearProcessSimulator(LinearProcessSimulator&&) noexcept;
    LinearProcessSimulator& operator=(LinearProcessSimulator&&) noexcept;

    LinearProcessPath simulate(std::uint64_t seed) const;

    const CoefficientSchedule& schedule() const noexcept { return schedule_; }
    const InnovationModel& innovation() const noexcept { return innovation_; }
    std::int64_t length() const noexcept { return n_; }
    const Truncation& truncation() const noexcept { return truncation_; }

private:
    CoefficientSchedule schedule_;
    InnovationModel innovation_;
    std::int64_t n_;
    Truncation truncation_;
    Eigen::VectorXd lag_taps_;  // 0, a_1, ..., a_M
    std::unique_ptr<detail::FftFilter> fft_;
    // Far past: taps 0, a_{M+1}, ..., a_{M+n-1} over the record, and the
    // n x K map from K standard normals to the older remainder.
    Eigen::VectorXd record_taps_;
    std::unique_ptr<detail::FftFilter> record_fft_;
    Eigen::MatrixXd far_map_;
};

LinearProcessPath simulate_path(const CoefficientSchedule& schedule, const InnovationModel& innovation, std::int64_t n,
                                double truncation_tolerance, std::uint64_t seed,
                                std::int64_t max_lag = kDefaultMaxLag);

LinearProcessPath simulate_path(const CoefficientSchedule& schedule, const InnovationModel& innovation, std::int64_t n,
                                const Truncation& truncation, std::uint64_t seed);

/// Marginal law of the truncated process by Rao-Blackwellization over R
/// i.i.d. tails T = sum_{i=1}^{M} a_i eps_i: F(x) = mean F_eps(x - T_j).
/// Gaussian tails are drawn from their exact N(0, sigma^2 sum a_i^2) law.
/// With FarPast::gaussian each tail also carries an independent normal of
/// variance sigma^2 sum_{i>M} a_i^2, matching the simulator.
MarginalOracle build_marginal_oracle(const CoefficientSchedule& schedule, const InnovationModel& innovation,
                                     std::int64_t replicates, std::int64_t truncation_lag, std::uint64_t seed,
                                     FarPast far_past = FarPast::none);

}  // namespace bahadur
