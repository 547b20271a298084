#include "bahadur/innovations.hpp"

#include "bahadur/errors.hpp"
#include "bahadur/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bahadur {

namespace sp = special;

namespace {

constexpr double kMollifyFraction = 1e-2;

}  // namespace

std::string_view to_string(Family family) {
    switch (family) {
        case Family::gaussian: return "gaussian";
        case Family::uniform: return "uniform";
        case Family::uniform_smoothwrap: return "uniform_smoothwrap";
        case Family::student_t: return "student_t";
        case Family::logistic: return "logistic";
    }
    return "unknown";
}

Family family_from_string(std::string_view name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "uniform") return Family::uniform;
    if (name == "uniform_smoothwrap") return Family::uniform_smoothwrap;
    if (name == "student_t") return Family::student_t;
    if (name == "logistic") return Family::logistic;
    throw InvalidParameter("unknown innovation family '" + std::string(name) + "'");
}

InnovationModel::InnovationModel(Family family, double scale, double nu)
    : family_(family), scale_(scale), nu_(nu), t_log_norm_(0.0) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidParameter("innovation scale must be positive");
    if (family == Family::student_t) {
        if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidParameter("student_t nu must be positive");
        t_log_norm_ = sp::student_t_log_norm(nu);
    }
}

InnovationModel InnovationModel::gaussian(double scale) { return {Family::gaussian, scale, 0.0}; }
InnovationModel InnovationModel::uniform(double scale) { return {Family::uniform, scale, 0.0}; }
InnovationModel InnovationModel::uniform_smoothwrap(double scale) { return {Family::uniform_smoothwrap, scale, 0.0}; }
InnovationModel InnovationModel::student_t(double nu, double scale) { return {Family::student_t, scale, nu}; }
InnovationModel InnovationModel::logistic(double scale) { return {Family::logistic, scale, 0.0}; }

double InnovationModel::alpha_moment() const noexcept {
    if (family_ == Family::student_t) return nu_ - kMomentMargin;
    return std::numeric_limits<double>::infinity();
}

double InnovationModel::variance() const noexcept {
    const double s2 = scale_ * scale_;
    switch (family_) {
        case Family::gaussian: return s2;
        case Family::uniform: return s2 / 12.0;
        case Family::uniform_smoothwrap: return s2 / 12.0 + kMollifyFraction * kMollifyFraction * s2;
        case Family::student_t: return nu_ > 2.0 ? s2 * nu_ / (nu_ - 2.0) : std::numeric_limits<double>::infinity();
        case Family::logistic: return s2 * sp::kPi * sp::kPi / 3.0;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double InnovationModel::support_radius() const noexcept {
    if (family_ == Family::uniform) return scale_;
    return std::numeric_limits<double>::infinity();
}

double InnovationModel::cdf(double x) const {
    const double z = x / scale_;
    switch (family_) {
        case Family::gaussian: return sp::normal_cdf(z);
        case Family::uniform: return z <= 0.0 ? 0.0 : (z >= 1.0 ? 1.0 : z);
        case Family::uniform_smoothwrap: {
            // (1/w)[G(z+1/2) - G(z-1/2)] with G(y) = y Phi(y/s) + s phi(y/s)
            const double s = kMollifyFraction;
            auto g = [s](double y) { return y * sp::normal_cdf(y / s) + s * sp::normal_pdf(y / s); };
            return std::clamp(g(z + 0.5) - g(z - 0.5), 0.0, 1.0);
        }
        case Family::student_t: return sp::student_t_cdf(z, nu_);
        case Family::logistic: {
            // Computed on the side where exp does not overflow.
            if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
            const double e = std::exp(z);
            return e / (1.0 + e);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double InnovationModel::pdf(double x) const { return pdf_deriv(x, 0); }

double InnovationModel::pdf_deriv(double x, int order) const {
    if (order < 0 || order > 2) throw InvalidParameter("pdf_deriv order must be 0, 1 or 2");
    const double z = x / scale_;
    const double norm = std::pow(scale_, -(order + 1));
    double value = 0.0;
    switch (family_) {
        case Family::gaussian: {
            const double phi = sp::normal_pdf(z);
            value = order == 0 ? phi : (order == 1 ? -z * phi : (z * z - 1.0) * phi);
            break;
        }
        case Family::uniform:
            value = (order == 0 && z >= 0.0 && z <= 1.0) ? 1.0 : 0.0;
            break;
        case Family::uniform_smoothwrap: {
            const double s = kMollifyFraction;
            const double u = (z + 0.5) / s;
            const double v = (z - 0.5) / s;
            if (order == 0) {
                value = sp::normal_cdf(u) - sp::normal_cdf(v);
            } else if (order == 1) {
                value = (sp::normal_pdf(u) - sp::normal_pdf(v)) / s;
            } else {
                value = (-u * sp::normal_pdf(u) + v * sp::normal_pdf(v)) / (s * s);
            }
            break;
        }
        case Family::student_t: {
            const double nu = nu_;
            const double w = 1.0 + z * z / nu;
            const double k = 0.5 * (nu + 1.0);
            const double c = std::exp(t_log_norm_);
            if (order == 0) {
                value = c * std::pow(w, -k);
            } else if (order == 1) {
                value = -c * (2.0 * k / nu) * z * std::pow(w, -k - 1.0);
            } else {
                value = -c * (2.0 * k / nu) * std::pow(w, -k - 2.0) * (1.0 - (2.0 * k + 1.0) * z * z / nu);
            }
            break;
        }
        case Family::logistic: {
            const double e = std::exp(-std::abs(z));
            const double f = e / ((1.0 + e) * (1.0 + e));
            // f = F(1 - F) and 1 - 2F, written in terms of e^{-|z|}.
            const double one_minus_2F = (z >= 0.0 ? -1.0 : 1.0) * (1.0 - e) / (1.0 + e);
            if (order == 0) {
                value = f;
            } else if (order == 1) {
                value = f * one_minus_2F;
            } else {
                value = f * (one_minus_2F * one_minus_2F - 2.0 * f);
            }
            break;
        }
    }
    return value * norm;
}

double InnovationModel::quantile(double u) const {
    switch (family_) {
        case Family::gaussian: return scale_ * sp::normal_quantile(u);
        case Family::uniform: return scale_ * u;
        case Family::student_t: return scale_ * sp::student_t_quantile(u, nu_);
        case Family::logistic: return scale_ * std::log(u / (1.0 - u));
        case Family::uniform_smoothwrap: {
            // No closed form; bisection on the cdf.
            double lo = -0.5 * scale_ - 10.0 * kMollifyFraction * scale_;
            double hi = -lo;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * scale_; ++it) {
                const double mid = 0.5 * (lo + hi);
                (cdf(mid) < u ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double InnovationModel::draw(RandomStream& stream) const {
    if (family_ == Family::uniform_smoothwrap) {
        const double u = stream.uniform() - 0.5;
        const double z = sp::normal_quantile(stream.uniform());
        return scale_ * (u + kMollifyFraction * z);
    }
    if (family_ == Family::student_t) {
        // Bailey's polar transform; exact, and far cheaper than inverting the cdf.
        const double u1 = 1.0 - stream.uniform();
        const double u2 = stream.uniform();
        return scale_ * std::sqrt(nu_ * std::expm1(-2.0 / nu_ * std::log(u1))) * std::cos(2.0 * std::numbers::pi * u2);
    }
    return quantile(stream.uniform());
}

std::string InnovationModel::describe() const {
    std::ostringstream out;
    out << to_string(family_) << "(scale=" << scale_;
    if (family_ == Family::student_t) out << ", nu=" << nu_;
    out << ")";
    return out.str();
}

Eigen::VectorXd sample(const InnovationModel& model, RandomStream& stream, Eigen::Index count) {
    if (count < 1) throw InvalidParameter("sample: count must be >= 1");
    Eigen::VectorXd out(count);
    for (Eigen::Index i = 0; i < count; ++i) out[i] = model.draw(stream);
    return out;
}

}  // namespace bahadur
