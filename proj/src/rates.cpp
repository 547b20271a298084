#include "bahadur/rates.hpp"

#include "bahadur/errors.hpp"
#include "bahadur/special.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace bahadur {

std::string_view to_string(RateKind kind) {
    switch (kind) {
        case RateKind::ell_q: return "ell_q";
        case RateKind::iota_q: return "iota_q";
        case RateKind::psi: return "psi";
        case RateKind::sigma_n1_asym: return "sigma_n1_asym";
        case RateKind::sigma_n1_exact: return "sigma_n1_exact";
        case RateKind::A_beta: return "A_beta";
        case RateKind::b_thm3: return "b_thm3";
        case RateKind::c_beta: return "c_beta";
        case RateKind::lrd_exponent: return "lrd_exponent";
        case RateKind::kiefer_scale: return "kiefer_scale";
    }
    return "unknown";
}

RateKind rate_kind_from_string(std::string_view name) {
    for (RateKind k : {RateKind::ell_q, RateKind::iota_q, RateKind::psi, RateKind::sigma_n1_asym,
                       RateKind::sigma_n1_exact, RateKind::A_beta, RateKind::b_thm3, RateKind::c_beta,
                       RateKind::lrd_exponent, RateKind::kiefer_scale}) {
        if (to_string(k) == name) return k;
    }
    throw InvalidParameter("unknown rate function '" + std::string(name) + "'");
}

namespace {

void check_beta(double beta) {
    if (!(beta > 0.5 && beta < 1.0)) throw DomainError("beta must lie in (1/2, 1)");
}

double psi(std::int64_t n, double beta, const SlowlyVarying& L) {
    double sum = 0.0;
    for (std::int64_t k = 1; k <= n; ++k) {
        const double x = static_cast<double>(k);
        const double l = L(x);
        sum += std::pow(x, 0.5 - 2.0 * beta) * l * l;
    }
    return std::sqrt(static_cast<double>(n)) * sum;
}

// Integral of a(t) = t^-kappa h(t) over [lo, lo + width], lo > 0.
double coefficient_mass(const CoefficientSchedule& s, double lo, double width) {
    const double kappa = s.kind() == ScheduleKind::lrd ? s.beta() : s.r();
    const bool h_constant =
        s.kind() == ScheduleKind::polynomial_srd || s.slowly_varying().kind == SlowlyVarying::Kind::constant;
    if (h_constant) {
        const double c = s.kind() == ScheduleKind::lrd ? s.slowly_varying().value : 1.0;
        // lo^{1-k} ((1 + w/lo)^{1-k} - 1) / (1-k), without cancellation when w << lo
        return c * std::pow(lo, 1.0 - kappa) * std::expm1((1.0 - kappa) * std::log1p(width / lo)) / (1.0 - kappa);
    }
    static const special::GaussRule rule = special::gauss_legendre(16);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
        const double t = lo + 0.5 * width * (rule.nodes[i] + 1.0);
        sum += rule.weights[i] * std::pow(t, -kappa) * s.slowly_varying()(t);
    }
    return 0.5 * width * sum;
}

}  // namespace

double c_beta(double beta, double innovation_variance) {
    check_beta(beta);
    // [0,1]: x = t^{1/(1-beta)} removes the x^-beta singularity.
    auto head = [beta](double t) {
        const double x = std::pow(t, 1.0 / (1.0 - beta));
        return std::pow(1.0 + x, -beta) / (1.0 - beta);
    };
    // [1,inf): x = s^{-1/(2beta-1)} maps the tail onto (0,1].
    auto tail = [beta](double s) {
        if (s <= 0.0) return 1.0 / (2.0 * beta - 1.0);
        const double x = std::pow(s, -1.0 / (2.0 * beta - 1.0));
        return std::pow(1.0 + 1.0 / x, -beta) / (2.0 * beta - 1.0);
    };
    const double value = special::integrate(head, 0.0, 1.0, 1e-12).value + special::integrate(tail, 0.0, 1.0, 1e-12).value;
    return innovation_variance * value;
}

double lrd_exponent(double beta) {
    check_beta(beta);
    return std::max(-beta / 2.0 - 0.25, 1.5 - 3.0 * beta);
}

double partial_sum_variance(const CoefficientSchedule& schedule, double innovation_variance, std::int64_t n,
                            std::optional<std::int64_t> truncation_lag) {
    if (n < 1) throw InvalidParameter("partial_sum_variance needs n >= 1");
    const double nd = static_cast<double>(n);
    if (schedule.kind() == ScheduleKind::iid) return innovation_variance * nd;

    // Sum_{i=1}^n X_i = sum_{d>=0} c(d) eps_{n-d}, c(d) = sum_{k=max(0,d-n+1)}^{d} a_k.
    const std::int64_t M = truncation_lag.value_or(-1);
    auto a = [&](std::int64_t k) { return (M >= 0 && k > M) ? 0.0 : schedule.coefficient(k); };

    std::int64_t stop;
    if (M >= 0) {
        stop = n + M - 1;
    } else if (schedule.kind() == ScheduleKind::geometric) {
        stop = n - 1;
    } else {
        stop = std::max<std::int64_t>(16 * n, 4096);
    }

    std::vector<double> ring(static_cast<std::size_t>(n), 0.0);  // a_{d-n+1..d}
    double c = 0.0, comp = 0.0, total = 0.0, total_comp = 0.0;
    for (std::int64_t d = 0; d <= stop; ++d) {
        const double incoming = a(d);
        double& slot = ring[static_cast<std::size_t>(d % n)];
        const double delta = incoming - slot;  // slot holds a_{d-n}, or 0 at start
        slot = incoming;
        // Kahan running sum keeps the difference of nearly equal partial sums accurate.
        const double y = delta - comp;
        const double t = c + y;
        comp = (t - c) - y;
        c = t;
        const double sq = c * c - total_comp;
        const double tt = total + sq;
        total_comp = (tt - total) - sq;
        total = tt;
    }
    if (M >= 0) return innovation_variance * total;

    if (schedule.kind() == ScheduleKind::geometric) {
        // c(d) = rho^{d-n+1} (1 - rho^n)/(1 - rho) for d >= n.
        const double rho = schedule.rho();
        const double head = (1.0 - std::pow(rho, nd)) / (1.0 - rho) * rho;
        return innovation_variance * (total + head * head / (1.0 - rho * rho));
    }

    // Tail d > stop: c(d) ~ integral of a over [d-n+1/2, d+1/2] and the sum
    // over d by the integral from stop + 1/2.
    const double decay = schedule.kind() == ScheduleKind::lrd ? schedule.beta() : schedule.r();
    const double s = 2.0 * decay;
    const double start = static_cast<double>(stop) + 0.5;
    auto g = [&](double x) {
        const double m = coefficient_mass(schedule, x - nd + 0.5, nd);
        return m * m;
    };
    auto integrand = [&](double w) {
        if (w <= 0.0) w = 1e-300;
        const double x = start * std::pow(w, -1.0 / (s - 1.0));
        if (!std::isfinite(x)) return 0.0;
        return g(x) * std::pow(x, s);
    };
    const double tail = std::pow(start, 1.0 - s) / (s - 1.0) * special::integrate(integrand, 0.0, 1.0, 1e-10).value;
    return innovation_variance * (total + tail);
}

double rate_function(RateKind kind, std::int64_t n, const RateParams& params) {
    switch (kind) {
        case RateKind::c_beta:
            if (params.alpha_moment < 2.0) throw DomainError("c_beta needs a finite innovation variance");
            return c_beta(params.beta, params.innovation_variance);
        case RateKind::lrd_exponent: return lrd_exponent(params.beta);
        default: break;
    }
    if (n < kMinRateN) {
        throw DomainError(std::string(to_string(kind)) + " is defined for n >= 16, got n = " + std::to_string(n));
    }
    const double nd = static_cast<double>(n);
    const double ln = std::log(nd);
    const double lln = std::log(ln);
    const bool sigma_kind =
        kind == RateKind::sigma_n1_asym || kind == RateKind::sigma_n1_exact || kind == RateKind::b_thm3;
    if (sigma_kind && params.alpha_moment < 2.0) {
        throw DomainError(std::string(to_string(kind)) + " needs a finite innovation variance (alpha_moment >= 2)");
    }

    switch (kind) {
        case RateKind::ell_q:
            if (!(params.q >= 2.0)) throw DomainError("q must be >= 2");
            return params.q > 2.0 ? std::sqrt(lln) : std::pow(ln, 1.5) * lln;
        case RateKind::iota_q:
            if (!(params.q >= 2.0)) throw DomainError("q must be >= 2");
            return params.q > 2.0 ? std::pow(ln, 1.0 / params.q) * std::pow(lln, 2.0 / params.q)
                                  : std::pow(ln, 1.5) * lln;
        case RateKind::psi:
            check_beta(params.beta);
            return psi(n, params.beta, params.L);
        case RateKind::sigma_n1_asym: {
            check_beta(params.beta);
            const double b = params.beta;
            const double l = params.L(nd);
            return std::sqrt(c_beta(b, params.innovation_variance) / ((1.0 - b) * (3.0 - 2.0 * b)) *
                             std::pow(nd, 3.0 - 2.0 * b) * l * l);
        }
        case RateKind::sigma_n1_exact:
        case RateKind::b_thm3: {
            check_beta(params.beta);
            const auto schedule = CoefficientSchedule::lrd(params.beta, params.L);
            const double sigma =
                std::sqrt(partial_sum_variance(schedule, params.innovation_variance, n, params.truncation_lag));
            if (kind == RateKind::sigma_n1_exact) return sigma;
            return sigma * std::sqrt(ln) * lln / nd;
        }
        case RateKind::A_beta: {
            check_beta(params.beta);
            const double p = psi(n, params.beta, params.L);
            return p * p * (params.beta < 0.75 ? ln : ln * ln * ln) * lln * lln;
        }
        case RateKind::kiefer_scale: return std::pow(nd, -0.75) * std::pow(lln, 0.75);
        default: break;
    }
    throw InvalidParameter("unhandled rate kind");
}

}  // namespace bahadur
