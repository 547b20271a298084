#include "bahadur/marginal.hpp"

#include "bahadur/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bahadur {

double MarginalDistribution::quantile(double p) const {
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    if (!(p < 1.0)) return std::numeric_limits<double>::infinity();

    const double width0 = std::max(spread(), 1e-12);
    double lo = -width0, hi = width0;
    for (double w = width0; cdf(lo) >= p; w *= 2.0) {
        hi = lo;
        lo -= w;
    }
    for (double w = width0; cdf(hi) < p; w *= 2.0) {
        lo = hi;
        hi += w;
    }

    // Safeguarded Newton; the bracket keeps F(lo) < p <= F(hi).
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        const double F = cdf(x);
        const double r = F - p;
        if (r < 0.0) lo = x; else hi = x;
        if (std::abs(r) <= 1e-13) return x;
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) return hi;
        const double f = pdf(x);
        double next = f > 0.0 ? x - r / f : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

// ---------------------------------------------------------------------------
// MarginalOracle

MarginalOracle::MarginalOracle(InnovationModel innovation, std::vector<MixtureAtom> draws, OracleOptions options,
                               Provenance provenance)
    : innovation_(innovation), options_(options), provenance_(provenance) {
    if (draws.empty()) throw InvalidParameter("MarginalOracle needs at least one draw");
    draws_ = static_cast<double>(draws.size());

    double sum_sq = 0.0, sum_sq2 = 0.0, sum_scale = 0.0;
    bool common_scale = true;
    bool degenerate = true;
    for (auto& d : draws) {
        d.loc_sq = d.loc * d.loc;
        sum_sq += d.loc_sq;
        sum_sq2 += d.loc_sq * d.loc_sq;
        sum_scale += d.scale;
        common_scale = common_scale && d.scale == draws.front().scale;
        degenerate = degenerate && d.loc == draws.front().loc && d.scale == draws.front().scale;
    }
    exact_ = degenerate;
    const double mean_sq = sum_sq / draws_;
    spread_ = std::sqrt(mean_sq) + (sum_scale / draws_) * innovation_.scale();

    if (options_.control_mean && !exact_) {
        control_var_ = sum_sq2 / draws_ - mean_sq * mean_sq;
        control_bias_ = mean_sq - *options_.control_mean;
        if (!(control_var_ > 0.0) || !std::isfinite(control_var_)) options_.control_mean.reset();
    } else {
        options_.control_mean.reset();
    }

    const bool paired = options_.antithetic;
    auto key = [paired](const MixtureAtom& a) { return paired ? std::abs(a.loc) : a.loc; };
    if (common_scale && options_.bin_width > 0.0 && draws.size() > 1) {
        std::sort(draws.begin(), draws.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
        const double h = options_.bin_width * innovation_.scale() * draws.front().scale;
        std::size_t i = 0;
        while (i < draws.size()) {
            const double start = key(draws[i]);
            double w = 0.0, s1 = 0.0, s2 = 0.0;
            std::size_t j = i;
            for (; j < draws.size() && key(draws[j]) - start <= h; ++j) {
                w += draws[j].weight;
                s1 += draws[j].weight * key(draws[j]);
                s2 += draws[j].weight * draws[j].loc_sq;
            }
            atoms_.push_back({s1 / w, draws[i].scale, w, s2 / w});
            i = j;
        }
    } else {
        atoms_ = std::move(draws);
    }
    total_weight_ = 0.0;
    for (const auto& a : atoms_) total_weight_ += a.weight;

    if (!exact_) {
        const double lo = quantile(0.01), hi = quantile(0.99);
        for (int k = 0; k <= 40; ++k) precision_ = std::max(precision_, standard_error(lo + (hi - lo) * k / 40.0));
    }
}

template <class Kernel>
MarginalOracle::Moments MarginalOracle::evaluate(double x, Kernel kernel) const {
    double m1 = 0.0, m2 = 0.0, mc = 0.0, mgc = 0.0;
    for (const auto& a : atoms_) {
        double g;
        if (options_.antithetic) {
            g = 0.5 * (kernel((x - a.loc) / a.scale, a.scale) + kernel((x + a.loc) / a.scale, a.scale));
        } else {
            g = kernel((x - a.loc) / a.scale, a.scale);
        }
        m1 += a.weight * g;
        m2 += a.weight * g * g;
        mc += a.weight * a.loc_sq;
        mgc += a.weight * g * a.loc_sq;
    }
    m1 /= total_weight_;
    m2 /= total_weight_;
    double var = std::max(0.0, m2 - m1 * m1);
    if (options_.control_mean) {
        mc /= total_weight_;
        mgc /= total_weight_;
        const double cov = mgc - m1 * mc;
        const double coef = cov / control_var_;
        m1 -= coef * control_bias_;
        var = std::max(0.0, var - cov * cov / control_var_);
    }
    return {m1, var};
}

double MarginalOracle::cdf(double x) const {
    const double v = evaluate(x, [this](double z, double) { return innovation_.cdf(z); }).mean;
    return std::clamp(v, 0.0, 1.0);
}

double MarginalOracle::pdf(double x) const {
    const double v = evaluate(x, [this](double z, double s) { return innovation_.pdf(z) / s; }).mean;
    return std::max(v, 0.0);
}

double MarginalOracle::pdf_deriv(double x) const {
    return evaluate(x, [this](double z, double s) { return innovation_.pdf_deriv(z, 1) / (s * s); }).mean;
}

double MarginalOracle::standard_error(double x) const {
    if (exact_) return 0.0;
    const auto m = evaluate(x, [this](double z, double) { return innovation_.cdf(z); });
    return std::sqrt(m.variance / draws_);
}

// ---------------------------------------------------------------------------
// MarginalTable

namespace {

struct Quintic {
    double value, d1, d2;
};

// Quintic Hermite on t in [0,1] from value, first and second derivative
// (the derivatives already scaled by the cell width).
Quintic quintic_hermite(double t, double y0, double v0, double a0, double y1, double v1, double a1) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h3 = 0.5 * (t3 - 2 * t4 + t5);
    const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 10 * t3 - 15 * t4 + 6 * t5;

    const double d0 = -30 * t2 + 60 * t3 - 30 * t4;
    const double d1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    const double d2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
    const double d3 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    const double d4 = -12 * t2 + 28 * t3 - 15 * t4;
    const double d5 = -d0;

    const double s0 = -60 * t + 180 * t2 - 120 * t3;
    const double s1 = -36 * t + 96 * t2 - 60 * t3;
    const double s2 = 0.5 * (2 - 18 * t + 36 * t2 - 20 * t3);
    const double s3 = 0.5 * (6 * t - 24 * t2 + 20 * t3);
    const double s4 = -24 * t + 84 * t2 - 60 * t3;
    const double s5 = -s0;

    return {h0 * y0 + h1 * v0 + h2 * a0 + h3 * a1 + h4 * v1 + h5 * y1,
            d0 * y0 + d1 * v0 + d2 * a0 + d3 * a1 + d4 * v1 + d5 * y1,
            s0 * y0 + s1 * v0 + s2 * a0 + s3 * a1 + s4 * v1 + s5 * y1};
}

}  // namespace

MarginalTable::MarginalTable(Eigen::VectorXd x, Eigen::VectorXd F, Eigen::VectorXd f, Eigen::VectorXd fprime,
                             Eigen::VectorXd standard_error, std::shared_ptr<const MarginalDistribution> fallback)
    : x_(std::move(x)), F_(std::move(F)), f_(std::move(f)), fp_(std::move(fprime)), se_(std::move(standard_error)),
      fallback_(std::move(fallback)) {
    const Eigen::Index n = x_.size();
    if (n < 2 || F_.size() != n || f_.size() != n || fp_.size() != n || se_.size() != n)
        throw InvalidParameter("MarginalTable: inconsistent column lengths");
    step_ = (x_[n - 1] - x_[0]) / static_cast<double>(n - 1);
    if (!(step_ > 0.0)) throw InvalidParameter("MarginalTable: grid must be increasing");
    for (Eigen::Index i = 1; i < n; ++i) {
        if (std::abs(x_[i] - (x_[0] + step_ * static_cast<double>(i))) > 1e-9 * std::max(1.0, std::abs(x_[i])))
            throw InvalidParameter("MarginalTable: grid must be equally spaced");
    }
    precision_ = se_.maxCoeff();
    spread_ = fallback_ ? fallback_->spread() : (x_[n - 1] - x_[0]) / 8.0;
}

MarginalTable MarginalTable::tabulate(std::shared_ptr<const MarginalDistribution> source, double lo, double hi,
                                      Eigen::Index points) {
    if (!(hi > lo) || points < 2) throw InvalidParameter("MarginalTable::tabulate: need lo < hi and >= 2 points");
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(points, lo, hi);
    Eigen::VectorXd F(points), f(points), fp(points), se(points);
    for (Eigen::Index i = 0; i < points; ++i) {
        F[i] = source->cdf(x[i]);
        f[i] = source->pdf(x[i]);
        fp[i] = source->pdf_deriv(x[i]);
        se[i] = source->standard_error(x[i]);
    }
    return MarginalTable(std::move(x), std::move(F), std::move(f), std::move(fp), std::move(se), std::move(source));
}

bool MarginalTable::locate(double x, Eigen::Index& cell, double& t) const {
    const Eigen::Index n = x_.size();
    if (!(x >= x_[0] && x <= x_[n - 1])) return false;
    const double u = (x - x_[0]) / step_;
    cell = std::min<Eigen::Index>(static_cast<Eigen::Index>(u), n - 2);
    t = u - static_cast<double>(cell);
    return true;
}

double MarginalTable::cdf(double x) const {
    Eigen::Index i;
    double t;
    if (!locate(x, i, t)) {
        if (fallback_) return fallback_->cdf(x);
        return x < x_[0] ? 0.0 : 1.0;
    }
    const double h = step_;
    const auto q = quintic_hermite(t, F_[i], h * f_[i], h * h * fp_[i], F_[i + 1], h * f_[i + 1], h * h * fp_[i + 1]);
    return std::clamp(q.value, 0.0, 1.0);
}

double MarginalTable::pdf(double x) const {
    Eigen::Index i;
    double t;
    if (!locate(x, i, t)) return fallback_ ? fallback_->pdf(x) : 0.0;
    const double h = step_;
    const auto q = quintic_hermite(t, F_[i], h * f_[i], h * h * fp_[i], F_[i + 1], h * f_[i + 1], h * h * fp_[i + 1]);
    return std::max(q.d1 / h, 0.0);
}

double MarginalTable::pdf_deriv(double x) const {
    Eigen::Index i;
    double t;
    if (!locate(x, i, t)) return fallback_ ? fallback_->pdf_deriv(x) : 0.0;
    const double h = step_;
    const auto q = quintic_hermite(t, F_[i], h * f_[i], h * h * fp_[i], F_[i + 1], h * f_[i + 1], h * h * fp_[i + 1]);
    return q.d2 / (h * h);
}

double MarginalTable::standard_error(double x) const {
    Eigen::Index i;
    double t;
    if (!locate(x, i, t)) return fallback_ ? fallback_->standard_error(x) : 0.0;
    return (1.0 - t) * se_[i] + t * se_[i + 1];
}

void MarginalTable::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "x,F,f,fprime,se\n";
    char buf[160];
    for (Eigen::Index i = 0; i < x_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", x_[i], F_[i], f_[i], fp_[i], se_[i]);
        out << buf;
    }
}

MarginalTable MarginalTable::read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("x,F,f,fprime", 0) != 0) throw std::runtime_error(path.string() + ": unexpected header");
    std::vector<std::array<double, 5>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 5> row{};
        std::istringstream fields(line);
        std::string cell;
        for (double& v : row) {
            if (!std::getline(fields, cell, ',')) throw std::runtime_error(path.string() + ": short row");
            v = std::stod(cell);
        }
        rows.push_back(row);
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::VectorXd x(n), F(n), f(n), fp(n), se(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = rows[i][0];
        F[i] = rows[i][1];
        f[i] = rows[i][2];
        fp[i] = rows[i][3];
        se[i] = rows[i][4];
    }
    return MarginalTable(std::move(x), std::move(F), std::move(f), std::move(fp), std::move(se));
}

}  // namespace bahadur
