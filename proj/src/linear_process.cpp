#include "bahadur/linear_process.hpp"

#include "bahadur/errors.hpp"
#include "bahadur/special.hpp"
#include "fft_convolution.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace bahadur {

namespace {

// Above this lag the filter is applied through the FFT.
constexpr std::int64_t kDirectMaxLag = 256;

// Interpolation nodes for the older far past; the covariance is analytic in
// k well beyond [1, n], so 16 Chebyshev nodes reach round-off.
constexpr int kFarNodes = 16;
constexpr std::uint64_t kFarSalt = 0x6661722d70617374ULL;

void check_far_past(const CoefficientSchedule& schedule, const InnovationModel& innovation) {
    if (!schedule.long_memory()) throw InvalidParameter("far-past compensation needs a long-memory schedule");
    if (!innovation.symmetric() || !(innovation.alpha_moment() > 2.0)) {
        throw InvalidParameter("far-past compensation needs centered innovations with finite variance");
    }
}

// Rows: barycentric Lagrange weights of t = 1..n on the nodes.
Eigen::MatrixXd lagrange_rows(const Eigen::VectorXd& nodes, const Eigen::VectorXd& weights, std::int64_t n) {
    const Eigen::Index K = nodes.size();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, K);
    for (std::int64_t t = 0; t < n; ++t) {
        const double x = static_cast<double>(t + 1);
        Eigen::Index hit = -1;
        double denom = 0.0;
        for (Eigen::Index k = 0; k < K; ++k) {
            if (x == nodes[k]) hit = k;
            else denom += weights[k] / (x - nodes[k]);
        }
        if (hit >= 0) {
            P(t, hit) = 1.0;
            continue;
        }
        for (Eigen::Index k = 0; k < K; ++k) P(t, k) = weights[k] / (x - nodes[k]) / denom;
    }
    return P;
}

// Smallest m in [lo, hi] with pred(m) true, pred monotone.
template <class Pred>
std::int64_t first_true(std::int64_t lo, std::int64_t hi, Pred pred) {
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (pred(mid)) hi = mid; else lo = mid + 1;
    }
    return lo;
}

}  // namespace

std::string_view to_string(FarPast mode) { return mode == FarPast::gaussian ? "gaussian" : "none"; }

FarPast far_past_from_string(std::string_view name) {
    if (name == "none") return FarPast::none;
    if (name == "gaussian") return FarPast::gaussian;
    throw InvalidParameter("unknown far-past mode '" + std::string(name) + "'");
}

double far_past_covariance(const CoefficientSchedule& schedule, std::int64_t lag, double u, double v) {
    if (!schedule.long_memory()) throw InvalidParameter("far-past covariance needs a long-memory schedule");
    if (lag < 0 || !(u >= 1.0) || !(v >= 1.0)) throw InvalidParameter("far-past covariance needs M >= 0, u, v >= 1");
    const double beta = schedule.beta();
    const auto& L = schedule.slowly_varying();
    const double M = static_cast<double>(lag);
    auto g = [&](double m) {
        const double x = M + m;
        return std::pow(x + u, -beta) * L(x + u) * std::pow(x + v, -beta) * L(x + v);
    };
    constexpr int direct = 4096;
    double sum = 0.0;
    for (int m = 0; m < direct; ++m) sum += g(m);

    // Euler-Maclaurin for m >= direct. With x = X w^-s, s = 1/(2 beta - 1),
    // int_X^inf a(x+u) a(x+v) dx = X^{1-2 beta} s int_0^1 h(x(w)) dw and h is bounded.
    const double X = M + direct;
    const double s = 1.0 / (2.0 * beta - 1.0);
    auto h = [&](double w) {
        double x = X * std::pow(w, -s);
        if (!std::isfinite(x) || x > 1e300) x = 1e300;
        return std::pow(1.0 + u / x, -beta) * std::pow(1.0 + v / x, -beta) * L(x + u) * L(x + v);
    };
    const double integral = std::pow(X, 1.0 - 2.0 * beta) * s * special::integrate(h, 0.0, 1.0, 1e-12).value;
    const double slope = 0.5 * (g(direct + 1) - g(direct - 1));
    return sum + integral + 0.5 * g(direct) - slope / 12.0;
}

Truncation choose_truncation(const CoefficientSchedule& schedule, const InnovationModel& innovation, std::int64_t n,
                             double tolerance, std::int64_t max_lag) {
    if (!(tolerance > 0.0)) throw InvalidParameter("truncation tolerance must be positive");
    if (n < 1) throw InvalidParameter("path length must be >= 1");
    if (schedule.kind() == ScheduleKind::iid) return {0, 0.0, true};

    if (!schedule.long_memory()) {
        const double scale = innovation.scale();
        auto neglected = [&](std::int64_t m) { return schedule.tail_abs_sum(m + 1, 1.0) * scale; };
        std::int64_t hi = 1;
        while (neglected(hi) >= tolerance && hi < max_lag) hi = std::min(hi * 2, max_lag);
        if (neglected(hi) >= tolerance) return {max_lag, neglected(max_lag), false};
        const std::int64_t m = first_true(0, hi, [&](std::int64_t k) { return neglected(k) < tolerance; });
        return {m, neglected(m), true};
    }

    auto small = [&](std::int64_t m) { return std::abs(schedule.coefficient(m)) < tolerance; };
    std::int64_t hi = 1;
    while (!small(hi) && hi < max_lag) hi = std::min(hi * 2, max_lag);
    Truncation t;
    if (small(hi)) {
        t.lag = first_true(1, hi, small);
        t.met = true;
    } else {
        t.lag = max_lag;
        t.met = false;
    }
    t.lag = std::max(t.lag, n);
    t.achieved = std::abs(schedule.coefficient(t.lag));
    return t;
}

LinearProcessSimulator::LinearProcessSimulator(CoefficientSchedule schedule, InnovationModel innovation,
                                               std::int64_t n, Truncation truncation)
    : schedule_(schedule), innovation_(innovation), n_(n), truncation_(truncation) {
    if (n < 1) throw InvalidParameter("path length must be >= 1");
    if (truncation.lag < 0) throw InvalidParameter("truncation lag must be >= 0");
    lag_taps_ = schedule_.coefficients(truncation.lag);
    lag_taps_[0] = 0.0;
    if (truncation.lag > kDirectMaxLag) {
        fft_ = std::make_unique<detail::FftFilter>(lag_taps_, static_cast<Eigen::Index>(n));
    }
    if (truncation.far_past == FarPast::none) return;

    check_far_past(schedule_, innovation_);
    const std::int64_t M = truncation.lag;
    // Recorded innovations eps_{1-M}..eps_{k-M-1} reach X_k through a_{M+1}..a_{M+k-1}.
    record_taps_ = Eigen::VectorXd::Zero(n);
    for (std::int64_t j = 1; j < n; ++j) record_taps_[j] = schedule_.coefficient(M + j);
    if (n > kDirectMaxLag) record_fft_ = std::make_unique<detail::FftFilter>(record_taps_, static_cast<Eigen::Index>(n));

    // Older innovations: R_k = sum_{m>=0} a_{k+M+m} eps'_m, jointly Gaussian
    // at the nodes, Lagrange-interpolated in between.
    const int K = static_cast<int>(std::min<std::int64_t>(kFarNodes, n));
    Eigen::VectorXd nodes(K), weights(K);
    for (int k = 0; k < K; ++k) {
        if (n <= kFarNodes) {
            nodes[k] = k + 1.0;
            weights[k] = 1.0;
            for (int j = 0; j < K; ++j) if (j != k) weights[k] /= (k - j);
        } else {
            const double theta = (2.0 * k + 1.0) * special::kPi / (2.0 * K);
            nodes[k] = 0.5 * (n + 1.0) + 0.5 * (n - 1.0) * std::cos(theta);
            weights[k] = (k % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
        }
    }
    Eigen::MatrixXd C(K, K);
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l <= k; ++l) {
            C(k, l) = C(l, k) = innovation_.variance() * far_past_covariance(schedule_, M, nodes[k], nodes[l]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    const Eigen::MatrixXd root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    far_map_ = lagrange_rows(nodes, weights, n) * root;
}

LinearProcessSimulator::~LinearProcessSimulator() = default;
LinearProcessSimulator::LinearProcessSimulator(LinearProcessSimulator&&) noexcept = default;
LinearProcessSimulator& LinearProcessSimulator::operator=(LinearProcessSimulator&&) noexcept = default;

LinearProcessPath LinearProcessSimulator::simulate(std::uint64_t seed) const {
    RandomStream stream(seed);
    LinearProcessPath path;
    path.seed = seed;
    path.truncation = truncation_;
    path.innovations = sample(innovation_, stream, n_ + truncation_.lag);
    if (truncation_.lag == 0) {
        path.lagged_locations = Eigen::VectorXd::Zero(n_);
    } else if (fft_) {
        path.lagged_locations = fft_->apply(path.innovations);
    } else {
        path.lagged_locations = detail::direct_filter(lag_taps_, path.innovations, n_);
    }
    if (truncation_.far_past == FarPast::gaussian) {
        Eigen::VectorXd record = Eigen::VectorXd::Zero(2 * n_ - 1);
        record.tail(n_) = path.innovations.head(n_);
        path.lagged_locations += record_fft_ ? record_fft_->apply(record) : detail::direct_filter(record_taps_, record, n_);
        RandomStream far(mix64(seed ^ kFarSalt));
        Eigen::VectorXd z(far_map_.cols());
        for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = special::normal_quantile(far.uniform());
        path.lagged_locations += far_map_ * z;
    }
    path.values = path.lagged_locations + path.innovations.tail(n_);
    return path;
}

LinearProcessPath simulate_path(const CoefficientSchedule& schedule, const InnovationModel& innovation, std::int64_t n,
                                double truncation_tolerance, std::uint64_t seed, std::int64_t max_lag) {
    const Truncation t = choose_truncation(schedule, innovation, n, truncation_tolerance, max_lag);
    return LinearProcessSimulator(schedule, innovation, n, t).simulate(seed);
}

LinearProcessPath simulate_path(const CoefficientSchedule& schedule, const InnovationModel& innovation, std::int64_t n,
                                const Truncation& truncation, std::uint64_t seed) {
    return LinearProcessSimulator(schedule, innovation, n, truncation).simulate(seed);
}

MarginalOracle build_marginal_oracle(const CoefficientSchedule& schedule, const InnovationModel& innovation,
                                     std::int64_t replicates, std::int64_t truncation_lag, std::uint64_t seed,
                                     FarPast far_past) {
    if (replicates < 1) throw InvalidParameter("oracle replicates must be >= 1");
    if (truncation_lag < 0) throw InvalidParameter("oracle truncation lag must be >= 0");
    MarginalOracle::Provenance provenance{replicates, truncation_lag, seed};

    const Eigen::VectorXd a = schedule.coefficients(truncation_lag);
    const double sum_sq = a.tail(truncation_lag).squaredNorm();
    if (schedule.kind() == ScheduleKind::iid || truncation_lag == 0 || sum_sq == 0.0) {
        return MarginalOracle(innovation, {MixtureAtom{}}, OracleOptions{false, std::nullopt, 0.0}, provenance);
    }

    double far_sq = 0.0;
    if (far_past == FarPast::gaussian) {
        check_far_past(schedule, innovation);
        far_sq = far_past_covariance(schedule, truncation_lag, 1.0, 1.0);
    }

    RandomStream stream(seed);
    std::vector<MixtureAtom> tails(static_cast<std::size_t>(replicates));
    if (innovation.family() == Family::gaussian) {
        const double sd = innovation.scale() * std::sqrt(sum_sq + far_sq);
        for (auto& t : tails) t.loc = sd * special::normal_quantile(stream.uniform());
    } else {
        const Eigen::VectorXd lag_taps = a.tail(truncation_lag);
        const double far_sd = std::sqrt(innovation.variance() * far_sq);
        Eigen::VectorXd eps(truncation_lag);
        for (auto& t : tails) {
            for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = innovation.draw(stream);
            t.loc = lag_taps.dot(eps);
            if (far_sq > 0.0) t.loc += far_sd * special::normal_quantile(stream.uniform());
        }
    }

    OracleOptions options;
    options.antithetic = innovation.symmetric();
    // The quadratic control needs a finite fourth moment of the tail.
    if (innovation.alpha_moment() > 4.0) options.control_mean = innovation.variance() * (sum_sq + far_sq);
    return MarginalOracle(innovation, std::move(tails), options, provenance);
}

}  // namespace bahadur
