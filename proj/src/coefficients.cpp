#include "bahadur/coefficients.hpp"

#include "bahadur/errors.hpp"
#include "bahadur/special.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace bahadur {

double SlowlyVarying::operator()(double x) const {
    if (kind == Kind::constant) return value;
    return std::pow(std::log(std::exp(1.0) + x), value);
}

std::string_view to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::iid: return "iid";
        case ScheduleKind::geometric: return "geometric";
        case ScheduleKind::polynomial_srd: return "polynomial_srd";
        case ScheduleKind::lrd: return "lrd";
    }
    return "unknown";
}

ScheduleKind schedule_kind_from_string(std::string_view name) {
    if (name == "iid") return ScheduleKind::iid;
    if (name == "geometric") return ScheduleKind::geometric;
    if (name == "polynomial_srd") return ScheduleKind::polynomial_srd;
    if (name == "lrd") return ScheduleKind::lrd;
    throw InvalidParameter("unknown schedule kind '" + std::string(name) + "'");
}

CoefficientSchedule CoefficientSchedule::iid() { return {ScheduleKind::iid, 0.0, 0.0, 0.0, {}}; }

CoefficientSchedule CoefficientSchedule::geometric(double rho) {
    if (!(rho > -1.0 && rho < 1.0) || rho == 0.0) throw InvalidParameter("geometric rho must lie in (-1,1) \\ {0}");
    return {ScheduleKind::geometric, rho, 0.0, 0.0, {}};
}

CoefficientSchedule CoefficientSchedule::polynomial_srd(double r) {
    if (!(r > 1.0) || !std::isfinite(r)) throw InvalidParameter("polynomial_srd r must exceed 1");
    return {ScheduleKind::polynomial_srd, 0.0, r, 0.0, {}};
}

CoefficientSchedule CoefficientSchedule::lrd(double beta, SlowlyVarying L) {
    if (!(beta > 0.5 && beta < 1.0)) throw InvalidParameter("lrd beta must lie in (1/2, 1)");
    if (L.kind == SlowlyVarying::Kind::constant && !(L.value > 0.0))
        throw InvalidParameter("lrd constant L must be positive");
    if (!std::isfinite(L.value)) throw InvalidParameter("lrd L parameter must be finite");
    return {ScheduleKind::lrd, 0.0, 0.0, beta, L};
}

double CoefficientSchedule::coefficient(std::int64_t i) const {
    if (i < 0) return 0.0;
    if (i == 0) return 1.0;
    const double x = static_cast<double>(i);
    switch (kind_) {
        case ScheduleKind::iid: return 0.0;
        case ScheduleKind::geometric: return std::pow(rho_, x);
        case ScheduleKind::polynomial_srd: return std::pow(x, -r_);
        case ScheduleKind::lrd: return std::pow(x, -beta_) * L_(x);
    }
    return 0.0;
}

Eigen::VectorXd CoefficientSchedule::coefficients(std::int64_t lag) const {
    Eigen::VectorXd a(lag + 1);
    for (std::int64_t i = 0; i <= lag; ++i) a[i] = coefficient(i);
    return a;
}

namespace {

// Sum_{i >= N} x^-s h(x) bracketed by the trapezoid and midpoint rules,
// valid once the summand is convex and decreasing.
struct Bracket {
    double lower;
    double upper;
};

// Integral of x^-s h(x) over [start, inf), s > 1.
double power_tail_integral(double start, double s, const std::function<double(double)>& h, bool h_constant) {
    const double front = std::pow(start, 1.0 - s) / (s - 1.0);
    if (h_constant) return front * h(start);
    // x = start * w^(-1/(s-1)) maps [start, inf) onto (0, 1] with unit Jacobian weight.
    auto integrand = [&](double w) { return w <= 0.0 ? 0.0 : h(start * std::pow(w, -1.0 / (s - 1.0))); };
    return front * special::integrate(integrand, 0.0, 1.0, 1e-12).value;
}

}  // namespace

double CoefficientSchedule::tail_abs_sum(std::int64_t n, double exponent) const {
    if (!(exponent > 0.0 && exponent <= 1.0)) throw InvalidParameter("tail_abs_sum exponent must lie in (0, 1]");
    if (n < 0) n = 0;
    switch (kind_) {
        case ScheduleKind::iid: return n == 0 ? 1.0 : 0.0;
        case ScheduleKind::geometric: {
            const double q = std::pow(std::abs(rho_), exponent);
            return std::pow(q, static_cast<double>(n)) / (1.0 - q);
        }
        case ScheduleKind::polynomial_srd:
        case ScheduleKind::lrd: break;
    }

    const double decay = kind_ == ScheduleKind::lrd ? beta_ : r_;
    const double s = decay * exponent;
    if (s <= 1.0) {
        std::ostringstream msg;
        msg << "tail sum of |a_i|^" << exponent << " diverges for " << describe();
        throw DivergentTail(msg.str());
    }
    const bool h_constant = kind_ == ScheduleKind::polynomial_srd || L_.kind == SlowlyVarying::Kind::constant;
    auto h = [&](double x) {
        if (kind_ == ScheduleKind::polynomial_srd) return 1.0;
        return std::pow(std::abs(L_(x)), exponent);
    };
    auto term = [&](double x) { return std::pow(x, -s) * h(x); };

    double head = 0.0;
    std::int64_t i = n;
    if (i == 0) {
        head += 1.0;
        i = 1;
    }
    std::int64_t cut = std::max<std::int64_t>(i, 64);
    for (; i < cut; ++i) head += term(static_cast<double>(i));
    for (;;) {
        const double N = static_cast<double>(cut);
        const Bracket b{power_tail_integral(N, s, h, h_constant) + 0.5 * term(N),
                        power_tail_integral(N - 0.5, s, h, h_constant)};
        const double width = std::abs(b.upper - b.lower);
        if (width <= 1e-10 * (head + b.lower) || cut > (std::int64_t{1} << 40)) {
            return head + 0.5 * (b.lower + b.upper);
        }
        const std::int64_t next = cut * 2;
        for (; i < next; ++i) head += term(static_cast<double>(i));
        cut = next;
    }
}

std::string CoefficientSchedule::describe() const {
    std::ostringstream out;
    switch (kind_) {
        case ScheduleKind::iid: out << "iid"; break;
        case ScheduleKind::geometric: out << "geometric(rho=" << rho_ << ")"; break;
        case ScheduleKind::polynomial_srd: out << "polynomial_srd(r=" << r_ << ")"; break;
        case ScheduleKind::lrd:
            out << "lrd(beta=" << beta_ << ", L="
                << (L_.kind == SlowlyVarying::Kind::constant ? "const " : "log_power ") << L_.value << ")";
            break;
    }
    return out.str();
}

}  // namespace bahadur
