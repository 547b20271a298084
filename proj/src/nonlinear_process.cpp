#include "bahadur/nonlinear_process.hpp"

#include "bahadur/errors.hpp"
#include "bahadur/special.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bahadur {

std::string_view to_string(MapKind kind) {
    switch (kind) {
        case MapKind::ar1: return "ar1";
        case MapKind::arch1: return "arch1";
        case MapKind::tar: return "tar";
    }
    return "unknown";
}

MapKind map_kind_from_string(std::string_view name) {
    if (name == "ar1") return MapKind::ar1;
    if (name == "arch1") return MapKind::arch1;
    if (name == "tar") return MapKind::tar;
    throw InvalidParameter("unknown map kind '" + std::string(name) + "'");
}

IteratedMapModel::IteratedMapModel(MapKind kind, double p1, double p2, InnovationModel innovation,
                                   std::int64_t burn_in)
    : kind_(kind), p1_(p1), p2_(p2), innovation_(innovation), burn_in_(burn_in) {
    if (burn_in < 0) throw InvalidParameter("burn_in must be >= 0");
    if (!std::isfinite(p1) || !std::isfinite(p2)) throw InvalidParameter("map parameters must be finite");
}

IteratedMapModel IteratedMapModel::ar1(double a, InnovationModel innovation, std::int64_t burn_in) {
    if (!(std::abs(a) < 1.0)) throw InvalidParameter("ar1 needs |a| < 1");
    return {MapKind::ar1, a, 0.0, innovation, burn_in};
}

IteratedMapModel IteratedMapModel::arch1(double c0, double c1, InnovationModel innovation, std::int64_t burn_in) {
    if (!(c0 > 0.0) || !(c1 > 0.0)) throw InvalidParameter("arch1 needs c0 > 0 and c1 > 0");
    IteratedMapModel model{MapKind::arch1, c0, c1, innovation, burn_in};
    if (!(model.log_lipschitz_mean() < 0.0)) {
        throw InvalidParameter("arch1 is not contracting: E log(sqrt(c1) |eps|) >= 0");
    }
    return model;
}

IteratedMapModel IteratedMapModel::tar(double phi_plus, double phi_minus, InnovationModel innovation,
                                       std::int64_t burn_in) {
    if (!(std::max(std::abs(phi_plus), std::abs(phi_minus)) < 1.0)) {
        throw InvalidParameter("tar needs max(|phi_plus|, |phi_minus|) < 1");
    }
    return {MapKind::tar, phi_plus, phi_minus, innovation, burn_in};
}

double IteratedMapModel::location(double x) const noexcept {
    switch (kind_) {
        case MapKind::ar1: return p1_ * x;
        case MapKind::arch1: return 0.0;
        case MapKind::tar: return p1_ * std::max(x, 0.0) - p2_ * std::max(-x, 0.0);
    }
    return 0.0;
}

double IteratedMapModel::scale(double x) const noexcept {
    if (kind_ == MapKind::arch1) return std::sqrt(p1_ + p2_ * x * x);
    return 1.0;
}

bool IteratedMapModel::odd_symmetric() const noexcept {
    return kind_ != MapKind::tar || p1_ == p2_;
}

double IteratedMapModel::log_lipschitz_mean() const {
    switch (kind_) {
        case MapKind::ar1: return std::log(std::abs(p1_));
        case MapKind::tar: return std::log(std::max(std::abs(p1_), std::abs(p2_)));
        case MapKind::arch1: break;
    }
    // E log|eps| = int log|x| f(x) dx, one half-line at a time. x = e^{-t} on
    // (0, 1] and x = 1/w on [1, inf) leave bounded integrands.
    double mean_log;
    if (innovation_.family() == Family::uniform) {
        mean_log = std::log(innovation_.scale()) - 1.0;
    } else {
        mean_log = 0.0;
        for (double sign : {1.0, -1.0}) {
            auto near = [&](double t) { return -t * std::exp(-t) * innovation_.pdf(sign * std::exp(-t)); };
            auto far = [&](double w) { return -std::log(w) * innovation_.pdf(sign / w) / (w * w); };
            mean_log += special::integrate(near, 0.0, 60.0, 1e-10).value + special::integrate(far, 0.0, 1.0, 1e-10).value;
        }
    }
    return 0.5 * std::log(p2_) + mean_log;
}

std::string IteratedMapModel::describe() const {
    std::ostringstream out;
    switch (kind_) {
        case MapKind::ar1: out << "ar1(a=" << p1_ << ")"; break;
        case MapKind::arch1: out << "arch1(c0=" << p1_ << ", c1=" << p2_ << ")"; break;
        case MapKind::tar: out << "tar(phi_plus=" << p1_ << ", phi_minus=" << p2_ << ")"; break;
    }
    out << " with " << innovation_.describe();
    return out.str();
}

namespace {

void check_finite(double x) {
    if (!std::isfinite(x)) throw NonFinite("iterated map produced a non-finite value");
}

}  // namespace

double burned_in_state(const IteratedMapModel& model, RandomStream& stream) {
    double x = 0.0;
    for (std::int64_t i = 0; i < model.burn_in(); ++i) x = model.apply(x, model.innovation().draw(stream));
    check_finite(x);
    return x;
}

Eigen::VectorXd simulate_chain(const IteratedMapModel& model, std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw InvalidParameter("chain length must be >= 1");
    RandomStream stream(seed);
    double x = burned_in_state(model, stream);
    Eigen::VectorXd out(n);
    for (std::int64_t k = 0; k < n; ++k) {
        x = model.apply(x, model.innovation().draw(stream));
        out[k] = x;
    }
    if (!out.allFinite()) throw NonFinite("iterated map produced a non-finite value");
    return out;
}

CoupledPaths simulate_coupled(const IteratedMapModel& model, std::int64_t n, double alpha, std::uint64_t seed) {
    if (n < 1) throw InvalidParameter("chain length must be >= 1");
    if (!(alpha > 0.0)) throw InvalidParameter("alpha must be positive");
    RandomStream stream(seed);
    CoupledPaths out{Eigen::VectorXd(n + 1), Eigen::VectorXd(n + 1), Eigen::VectorXd(n + 1)};
    double x = burned_in_state(model, stream);
    double y = burned_in_state(model, stream);
    for (std::int64_t k = 0; k <= n; ++k) {
        if (k > 0) {
            const double e = model.innovation().draw(stream);
            x = model.apply(x, e);
            y = model.apply(y, e);
        }
        out.primary[k] = x;
        out.shadow[k] = y;
        out.distances[k] = std::pow(std::abs(x - y), alpha);
    }
    if (!out.primary.allFinite() || !out.shadow.allFinite()) throw NonFinite("coupled chain overflowed");
    return out;
}

GmcReport estimate_gmc(const IteratedMapModel& model, double alpha, std::int64_t n_max, std::int64_t replicates,
                       std::uint64_t seed) {
    if (!(alpha <= model.innovation().alpha_moment())) {
        throw InvalidParameter("alpha exceeds the innovation moment order");
    }
    if (replicates < 100) throw InvalidParameter("estimate_gmc needs at least 100 replicates");
    if (n_max < 1) throw InvalidParameter("n_max must be >= 1");

    GmcReport report;
    report.mean_distance = Eigen::VectorXd::Zero(n_max + 1);
    for (std::int64_t r = 0; r < replicates; ++r) {
        report.mean_distance += simulate_coupled(model, n_max, alpha, mix64(seed ^ mix64(r))).distances;
    }
    report.mean_distance /= static_cast<double>(replicates);

    const double floor = 10.0 * std::numeric_limits<double>::epsilon();
    std::int64_t usable = 0;
    while (usable <= n_max && report.mean_distance[usable] > floor) ++usable;
    report.usable_lags = usable;
    report.degenerate = usable < 5;
    if (usable < 2) {
        report.slope = -std::numeric_limits<double>::infinity();
        report.intercept = usable == 1 ? std::log(report.mean_distance[0]) : 0.0;
        report.r_hat = 0.0;
        return report;
    }
    Eigen::ArrayXd k = Eigen::ArrayXd::LinSpaced(usable, 0.0, static_cast<double>(usable - 1));
    Eigen::ArrayXd y = report.mean_distance.head(usable).array().log();
    const double kb = k.mean(), yb = y.mean();
    report.slope = ((k - kb) * (y - yb)).sum() / (k - kb).square().sum();
    report.intercept = yb - report.slope * kb;
    report.r_hat = std::exp(report.slope);
    return report;
}

MDependentPaths simulate_m_dependent(const IteratedMapModel& model, std::int64_t n, std::int64_t m,
                                     std::uint64_t seed) {
    if (!(m >= 1 && m < n)) throw InvalidParameter("simulate_m_dependent needs 1 <= m < n");
    RandomStream stream(seed);
    RandomStream fresh(mix64(seed ^ 0x6d2d646570656e64ULL));

    // eps_{2-m} .. eps_n; the original chain runs through all of them.
    const std::int64_t total = n + m - 1;
    Eigen::VectorXd eps = sample(model.innovation(), stream, total);
    MDependentPaths out{Eigen::VectorXd(n), Eigen::VectorXd(n), m};
    double x = burned_in_state(model, stream);
    for (std::int64_t i = 0; i < total; ++i) {
        x = model.apply(x, eps[i]);
        if (i >= m - 1) out.original[i - (m - 1)] = x;
    }
    for (std::int64_t k = 0; k < n; ++k) {
        double y = burned_in_state(model, fresh);
        for (std::int64_t i = k; i < k + m; ++i) y = model.apply(y, eps[i]);
        out.coupled[k] = y;
    }
    if (!out.original.allFinite() || !out.coupled.allFinite()) throw NonFinite("m-dependent coupling overflowed");
    return out;
}

std::vector<std::int64_t> block_indices(std::int64_t n, std::int64_t m, std::int64_t j) {
    if (m < 1) throw IndexError("block length m must be >= 1");
    if (j < 1 || j > m) throw IndexError("block index j must lie in [1, m]");
    const std::int64_t q = n / m;
    const std::int64_t A = j <= n - m * q ? q : q - 1;
    std::vector<std::int64_t> idx;
    for (std::int64_t i = 0; i <= A; ++i) idx.push_back(j + i * m);
    return idx;
}

double block_ecdf(const Eigen::VectorXd& values, std::int64_t m, std::int64_t j, double x) {
    const auto idx = block_indices(values.size(), m, j);
    if (idx.empty()) return 0.0;
    std::int64_t count = 0;
    for (std::int64_t i : idx) count += values[i - 1] <= x;
    return static_cast<double>(count) / static_cast<double>(idx.size());
}

MarginalOracle build_chain_oracle(const IteratedMapModel& model, std::int64_t replicates, std::uint64_t seed) {
    if (replicates < 1) throw InvalidParameter("oracle replicates must be >= 1");
    RandomStream stream(seed);
    const auto& eps = model.innovation();
    const bool gaussian_ar1 = model.kind() == MapKind::ar1 && eps.family() == Family::gaussian;
    const double a = model.param1();
    const double ar1_var = model.kind() == MapKind::ar1 ? eps.variance() / (1.0 - a * a) : 0.0;

    std::vector<MixtureAtom> atoms(static_cast<std::size_t>(replicates));
    for (auto& atom : atoms) {
        // Gaussian ar1 has an exact N(0, sigma^2 / (1 - a^2)) stationary law.
        const double x = gaussian_ar1 ? std::sqrt(ar1_var) * special::normal_quantile(stream.uniform())
                                      : burned_in_state(model, stream);
        atom.loc = model.location(x);
        atom.scale = model.scale(x);
    }

    OracleOptions options;
    options.antithetic = model.odd_symmetric() && eps.symmetric();
    if (model.kind() == MapKind::ar1 && eps.alpha_moment() > 4.0) options.control_mean = a * a * ar1_var;
    return MarginalOracle(eps, std::move(atoms), options, {replicates, model.burn_in(), seed});
}

}  // namespace bahadur
