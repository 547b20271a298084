#pragma once

#include "bahadur/random.hpp"

#include <Eigen/Core>

#include <limits>
#include <string>
#include <string_view>

namespace bahadur {

enum class Family {
    gaussian,
    uniform,             // U(0, scale); only for i.i.d. experiments, f is discontinuous
    uniform_smoothwrap,  // U(-scale/2, scale/2) convolved with N(0, (0.01 scale)^2)
    student_t,
    logistic,
};

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// Law of the i.i.d. innovations.
///
/// Immutable value type. Every family has closed-form cdf, pdf and the
/// first two pdf derivatives, and samples by inverse cdf or an exact
/// transform, so a draw consumes a fixed number of uniforms.
class InnovationModel {
public:
    static InnovationModel gaussian(double scale = 1.0);
    static InnovationModel uniform(double scale = 1.0);
    static InnovationModel uniform_smoothwrap(double scale = 1.0);
    static InnovationModel student_t(double nu, double scale = 1.0);
    static InnovationModel logistic(double scale = 1.0);

    Family family() const noexcept { return family_; }
    double scale() const noexcept { return scale_; }
    double nu() const noexcept { return nu_; }

    /// Largest a with E|eps|^a declared finite; +inf when all moments exist.
    double alpha_moment() const noexcept;
    bool symmetric() const noexcept { return family_ != Family::uniform; }
    /// Var(eps), +inf when the second moment is infinite.
    double variance() const noexcept;
    /// Upper bound on sup |eps| for bounded families, +inf otherwise.
    double support_radius() const noexcept;

    double cdf(double x) const;
    double pdf(double x) const;
    double pdf_deriv(double x, int order) const;
    double quantile(double u) const;

    /// Consumes `uniforms_per_draw()` values from the stream.
    double draw(RandomStream& stream) const;
    int uniforms_per_draw() const noexcept {
        return family_ == Family::uniform_smoothwrap || family_ == Family::student_t ? 2 : 1;
    }

    std::string describe() const;

    friend bool operator==(const InnovationModel&, const InnovationModel&) = default;

private:
    InnovationModel(Family family, double scale, double nu);

    Family family_;
    double scale_;
    double nu_;
    double t_log_norm_;
};

// Margin subtracted from nu when declaring the student_t moment order.
inline constexpr double kMomentMargin = 1e-3;

Eigen::VectorXd sample(const InnovationModel& model, RandomStream& stream, Eigen::Index count);

inline double cdf(const InnovationModel& model, double x) { return model.cdf(x); }
inline double pdf(const InnovationModel& model, double x) { return model.pdf(x); }
inline double pdf_deriv(const InnovationModel& model, double x, int order) { return model.pdf_deriv(x, order); }

}  // namespace bahadur
