#include "bahadur/remainder.hpp"

#include "bahadur/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace bahadur {

QuantilePoint quantile_point(const MarginalDistribution& F, double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("quantile level p must lie in (0, 1)");
    QuantilePoint q;
    q.p = p;
    q.xi = F.quantile(p);
    q.f = F.pdf(q.xi);
    q.fprime = F.pdf_deriv(q.xi);
    q.precision = F.precision();
    if (!(q.f > 0.0) || q.f < 10.0 * q.precision) {
        std::ostringstream msg;
        msg << "marginal density " << q.f << " at xi_" << p << " is below 10 x oracle precision " << q.precision;
        throw DensityTooSmall(msg.str());
    }
    return q;
}

BahadurDecomposition remainder(const EmpiricalSample& sample, const QuantilePoint& q, bool corrected) {
    BahadurDecomposition d;
    d.p = q.p;
    d.xi_p = q.xi;
    d.f_xi = q.f;
    d.fprime_xi = q.fprime;
    d.corrected = corrected;
    d.mean = sample.mean();
    d.xi_np = sample_quantile(sample, q.p);
    d.linear_term = (q.p - ecdf_eval(sample, q.xi)) / q.f;
    d.correction_term = d.mean * d.mean * q.fprime / (2.0 * q.f);
    d.remainder_srd = d.xi_np - d.xi_p - d.linear_term;
    d.remainder_lrd = d.remainder_srd - d.correction_term;
    d.error_bar = q.precision / q.f;
    return d;
}

BahadurDecomposition remainder(const EmpiricalSample& sample, double p, const MarginalDistribution& F,
                               bool corrected) {
    return remainder(sample, quantile_point(F, p), corrected);
}

UniformRemainder uniform_remainder(const EmpiricalSample& sample, const std::vector<GridPoint>& grid, bool corrected) {
    if (grid.empty()) throw InvalidParameter("uniform_remainder needs a nonempty grid");
    const double mean_sq = sample.mean() * sample.mean();
    UniformRemainder out;
    out.sup = -1.0;
    for (const auto& g : grid) {
        const auto& q = g.q;
        const Eigen::Index k = quantile_rank(sample.size(), q.p);
        double base = -q.xi - (q.p - ecdf_eval(sample, q.xi)) / q.f;
        if (corrected) base -= mean_sq * q.fprime / (2.0 * q.f);
        double r = std::abs(sample.order_statistic(k) + base);
        if (g.jump && k < sample.size()) r = std::max(r, std::abs(sample.order_statistic(k + 1) + base));
        if (r > out.sup) {
            out.sup = r;
            out.argmax_p = q.p;
        }
    }
    return out;
}

UniformRemainder uniform_remainder(const EmpiricalSample& sample, const std::vector<double>& p_grid,
                                   const MarginalDistribution& F, bool corrected) {
    std::vector<GridPoint> grid;
    grid.reserve(p_grid.size());
    for (double p : p_grid) grid.push_back({quantile_point(F, p), false});
    return uniform_remainder(sample, grid, corrected);
}

std::vector<GridPoint> uniform_grid(const MarginalDistribution& F, std::int64_t n, double p0, double p1, int points) {
    if (!(p0 > 0.0 && p0 < p1 && p1 < 1.0)) throw InvalidParameter("uniform grid needs 0 < p0 < p1 < 1");
    if (n < 1) throw InvalidParameter("uniform grid needs n >= 1");
    const auto m = std::max<std::int64_t>(std::max(points, 2), static_cast<std::int64_t>(std::ceil(std::sqrt(n))));
    std::vector<GridPoint> grid;
    for (std::int64_t i = 0; i < m; ++i) {
        const double p = p0 + (p1 - p0) * static_cast<double>(i) / static_cast<double>(m - 1);
        grid.push_back({quantile_point(F, p), false});
    }
    const auto first = static_cast<std::int64_t>(std::ceil(p0 * static_cast<double>(n)));
    const auto last = static_cast<std::int64_t>(std::floor(p1 * static_cast<double>(n)));
    for (std::int64_t k = std::max<std::int64_t>(first, 1); k <= std::min(last, n - 1); ++k) {
        grid.push_back({quantile_point(F, static_cast<double>(k) / static_cast<double>(n)), true});
    }
    return grid;
}

double kiefer_limit(double p, double f_at_quantile) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("kiefer_limit needs 0 < p < 1");
    if (!(f_at_quantile > 0.0)) throw InvalidParameter("kiefer_limit needs f > 0");
    return std::pow(2.0, 1.25) * std::pow(3.0, -0.75) * std::sqrt(p * (1.0 - p)) / f_at_quantile;
}

Expansion expansion_remainder(const EmpiricalSample& sample, const InnovationModel& innovation,
                              const MarginalDistribution& F, double y) {
    const double n = static_cast<double>(sample.size());
    const double Fn = ecdf_eval(sample, y);
    const double star = conditional_cdf(sample, innovation, y);
    const double Fy = F.cdf(y);
    const double drift = F.pdf(y) * sample.mean();
    Expansion e;
    e.S = n * (Fn - Fy + drift);
    e.H = n * (star - Fy + drift);
    e.nM = n * (Fn - star);
    return e;
}

std::string_view to_string(IncrementBranch branch) {
    switch (branch) {
        case IncrementBranch::gaussian: return "gaussian";
        case IncrementBranch::rosenblatt: return "rosenblatt";
        case IncrementBranch::automatic: return "auto";
    }
    return "unknown";
}

IncrementBranch increment_branch_from_string(std::string_view name) {
    if (name == "gaussian") return IncrementBranch::gaussian;
    if (name == "rosenblatt") return IncrementBranch::rosenblatt;
    if (name == "auto") return IncrementBranch::automatic;
    throw InvalidParameter("unknown branch '" + std::string(name) + "' (gaussian, rosenblatt, auto)");
}

IncrementBranch select_branch(double beta, double gamma) {
    const double gap = 4.0 * beta - 3.0 - gamma;
    if (std::abs(gap) < kBranchMargin) {
        std::ostringstream msg;
        msg << "4 beta - 3 = " << 4.0 * beta - 3.0 << " is within " << kBranchMargin << " of gamma = " << gamma
            << "; choose the branch explicitly";
        throw BoundaryRefusal(msg.str());
    }
    return gap > 0.0 ? IncrementBranch::gaussian : IncrementBranch::rosenblatt;
}

double raw_increment(const EmpiricalSample& sample, const MarginalDistribution& F, double x, double delta) {
    if (!(delta >= 0.0)) throw InvalidParameter("increment window must be >= 0");
    if (delta == 0.0) return 0.0;
    const double n = static_cast<double>(sample.size());
    const double y = x + delta;
    return n * (ecdf_eval(sample, y) - ecdf_eval(sample, x)) - n * (F.cdf(y) - F.cdf(x)) +
           n * sample.mean() * (F.pdf(y) - F.pdf(x));
}

Increment increment_statistic(const EmpiricalSample& sample, const MarginalDistribution& F, double x, double delta,
                              const IncrementParams& params) {
    Increment inc;
    inc.branch = params.branch == IncrementBranch::automatic ? select_branch(params.beta, params.gamma) : params.branch;
    inc.raw = raw_increment(sample, F, x, delta);
    if (delta == 0.0) return inc;
    const double n = static_cast<double>(sample.size());
    if (inc.branch == IncrementBranch::gaussian) {
        inc.normalized = inc.raw / std::sqrt(n * delta);
    } else {
        if (!(params.beta > 0.5 && params.beta < 1.0)) throw InvalidParameter("rosenblatt branch needs beta in (1/2, 1)");
        const double l = params.L(n);
        inc.normalized = inc.raw / (std::pow(n, 2.0 - 2.0 * params.beta) * l * l * delta);
    }
    return inc;
}

}  // namespace bahadur
