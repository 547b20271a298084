#pragma once

#include "bahadur/innovations.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

namespace bahadur {

/// Stationary marginal law of X_k: F, f, f' and the quantile function.
///
/// Implementations are immutable and safe to share across threads.
class MarginalDistribution {
public:
    virtual ~MarginalDistribution() = default;

    virtual double cdf(double x) const = 0;
    virtual double pdf(double x) const = 0;
    virtual double pdf_deriv(double x) const = 0;

    /// inf{x : F(x) >= p}, solved to |F(x) - p| <= 1e-12 where F is continuous.
    virtual double quantile(double p) const;

    /// Monte Carlo standard error of cdf(x); zero for exact laws.
    virtual double standard_error(double /*x*/) const { return 0.0; }
    /// Upper bound on standard_error over the central body of the law.
    virtual double precision() const { return 0.0; }
    /// A length scale of the law, used to seed root brackets.
    virtual double spread() const = 0;
};

/// F = F_eps: the marginal of an i.i.d. sequence, exact.
class InnovationMarginal final : public MarginalDistribution {
public:
    explicit InnovationMarginal(InnovationModel model) : model_(model) {}

    double cdf(double x) const override { return model_.cdf(x); }
    double pdf(double x) const override { return model_.pdf(x); }
    double pdf_deriv(double x) const override { return model_.pdf_deriv(x, 1); }
    double quantile(double p) const override { return model_.quantile(p); }
    double spread() const override { return model_.scale(); }

    const InnovationModel& innovation() const noexcept { return model_; }

private:
    InnovationModel model_;
};

/// One mixture component: X = loc + scale * eps given the past.
struct MixtureAtom {
    double loc = 0.0;
    double scale = 1.0;
    double weight = 1.0;
    double loc_sq = 0.0;  // mean of loc^2 over the draws merged into this atom
};

struct OracleOptions {
    /// Evaluate each atom together with its mirror image (-loc); valid
    /// when the law of the past is symmetric.
    bool antithetic = true;
    /// Known E[loc^2]; enables a quadratic control variate.
    std::optional<double> control_mean;
    /// Merge draws closer than this fraction of the innovation scale.
    double bin_width = 1e-3;
};

/// Rao-Blackwellized marginal: F(x) = E[F_eps((x - L)/S)] over the law of
/// the one-step-ahead location/scale (L, S), estimated from i.i.d. draws.
///
/// The estimate is a smooth function of x for a fixed set of draws, so
/// F, f and f' are mutually consistent derivatives up to the control
/// variate adjustment.
class MarginalOracle final : public MarginalDistribution {
public:
    struct Provenance {
        std::int64_t replicates = 0;
        std::int64_t truncation_lag = 0;
        std::uint64_t seed = 0;
    };

    MarginalOracle(InnovationModel innovation, std::vector<MixtureAtom> draws, OracleOptions options,
                   Provenance provenance);

    double cdf(double x) const override;
    double pdf(double x) const override;
    double pdf_deriv(double x) const override;
    double standard_error(double x) const override;
    double precision() const override { return precision_; }
    double spread() const override { return spread_; }

    const InnovationModel& innovation() const noexcept { return innovation_; }
    const Provenance& provenance() const noexcept { return provenance_; }
    std::size_t atom_count() const noexcept { return atoms_.size(); }
    bool exact() const noexcept { return exact_; }

private:
    struct Moments {
        double mean;
        double variance;  // per-draw variance of the (adjusted) estimator
    };
    template <class Kernel>
    Moments evaluate(double x, Kernel kernel) const;

    InnovationModel innovation_;
    std::vector<MixtureAtom> atoms_;
    OracleOptions options_;
    Provenance provenance_;
    double total_weight_ = 0.0;
    double draws_ = 0.0;
    double control_var_ = 0.0;
    double control_bias_ = 0.0;  // sample mean of loc^2 minus the known mean
    double spread_ = 1.0;
    double precision_ = 0.0;
    bool exact_ = false;
};

/// F, f, f' tabulated on a uniform grid; F by quintic and f by cubic
/// Hermite interpolation. Outside the grid it defers to `fallback` when
/// present, else saturates.
class MarginalTable final : public MarginalDistribution {
public:
    MarginalTable(Eigen::VectorXd x, Eigen::VectorXd F, Eigen::VectorXd f, Eigen::VectorXd fprime,
                  Eigen::VectorXd standard_error, std::shared_ptr<const MarginalDistribution> fallback = nullptr);

    /// Tabulate `source` on `points` equally spaced nodes over [lo, hi].
    static MarginalTable tabulate(std::shared_ptr<const MarginalDistribution> source, double lo, double hi,
                                  Eigen::Index points);

    double cdf(double x) const override;
    double pdf(double x) const override;
    double pdf_deriv(double x) const override;
    double standard_error(double x) const override;
    double precision() const override { return precision_; }
    double spread() const override { return spread_; }

    double lower() const { return x_[0]; }
    double upper() const { return x_[x_.size() - 1]; }

    /// CSV with header x,F,f,fprime,se; '.' decimal, 17 significant digits.
    void write_csv(const std::filesystem::path& path) const;
    static MarginalTable read_csv(const std::filesystem::path& path);

private:
    bool locate(double x, Eigen::Index& cell, double& t) const;

    Eigen::VectorXd x_, F_, f_, fp_, se_;
    double step_;
    double precision_ = 0.0;
    double spread_ = 1.0;
    std::shared_ptr<const MarginalDistribution> fallback_;
};

}  // namespace bahadur
