#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>

namespace bahadur {

/// Slowly varying factor L of the long-memory coefficients a_i = i^-beta L(i).
struct SlowlyVarying {
    enum class Kind { constant, log_power };

    Kind kind = Kind::constant;
    double value = 1.0;  // c for constant, gamma for log_power: L(x) = (log(e + x))^gamma

    static SlowlyVarying constant(double c = 1.0) { return {Kind::constant, c}; }
    static SlowlyVarying log_power(double gamma) { return {Kind::log_power, gamma}; }

    double operator()(double x) const;

    friend bool operator==(const SlowlyVarying&, const SlowlyVarying&) = default;
};

enum class ScheduleKind { iid, geometric, polynomial_srd, lrd };

std::string_view to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(std::string_view name);

/// Causal filter (a_i), a_0 = 1.
///
///   iid             a_i = 0 for i >= 1
///   geometric       a_i = rho^i
///   polynomial_srd  a_i = i^-r, r > 1
///   lrd             a_i = i^-beta L(i), 1/2 < beta < 1
class CoefficientSchedule {
public:
    static CoefficientSchedule iid();
    static CoefficientSchedule geometric(double rho);
    static CoefficientSchedule polynomial_srd(double r);
    static CoefficientSchedule lrd(double beta, SlowlyVarying L = SlowlyVarying::constant());

    ScheduleKind kind() const noexcept { return kind_; }
    double rho() const noexcept { return rho_; }
    double r() const noexcept { return r_; }
    double beta() const noexcept { return beta_; }
    const SlowlyVarying& slowly_varying() const noexcept { return L_; }

    bool long_memory() const noexcept { return kind_ == ScheduleKind::lrd; }

    double coefficient(std::int64_t i) const;
    /// a_0 .. a_lag
    Eigen::VectorXd coefficients(std::int64_t lag) const;

    /// Sum over i >= n of |a_i|^exponent. Throws DivergentTail when the
    /// series diverges.
    double tail_abs_sum(std::int64_t n, double exponent) const;

    std::string describe() const;

    friend bool operator==(const CoefficientSchedule&, const CoefficientSchedule&) = default;

private:
    CoefficientSchedule(ScheduleKind kind, double rho, double r, double beta, SlowlyVarying L)
        : kind_(kind), rho_(rho), r_(r), beta_(beta), L_(L) {}

    ScheduleKind kind_;
    double rho_;
    double r_;
    double beta_;
    SlowlyVarying L_;
};

inline double coefficient(const CoefficientSchedule& s, std::int64_t i) { return s.coefficient(i); }
inline double tail_abs_sum(const CoefficientSchedule& s, std::int64_t n, double exponent) {
    return s.tail_abs_sum(n, exponent);
}

}  // namespace bahadur
