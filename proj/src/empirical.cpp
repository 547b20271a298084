#include "bahadur/empirical.hpp"

#include "bahadur/errors.hpp"
#include "bahadur/linear_process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace bahadur {

EmpiricalSample::EmpiricalSample(Eigen::VectorXd values, std::optional<Eigen::VectorXd> lagged_locations)
    : values_(std::move(values)), lags_(std::move(lagged_locations)) {
    if (values_.size() < 1) throw InvalidParameter("an empirical sample needs n >= 1");
    if (lags_ && lags_->size() != values_.size()) {
        throw InvalidParameter("lagged_locations must have the same length as the values");
    }
    sorted_ = values_;
    std::sort(sorted_.data(), sorted_.data() + sorted_.size());
    mean_ = values_.mean();
}

EmpiricalSample EmpiricalSample::from_path(const LinearProcessPath& path) {
    return EmpiricalSample(path.values, path.lagged_locations);
}

const Eigen::VectorXd& EmpiricalSample::lagged_locations() const {
    if (!lags_) throw MissingLags("sample carries no lagged locations");
    return *lags_;
}

double EmpiricalSample::order_statistic(Eigen::Index k) const {
    if (k < 1 || k > size()) throw IndexError("order statistic index out of range");
    return sorted_[k - 1];
}

double ecdf_eval(const EmpiricalSample& sample, double x) {
    const auto& s = sample.sorted();
    const auto it = std::upper_bound(s.data(), s.data() + s.size(), x);
    return static_cast<double>(it - s.data()) / static_cast<double>(s.size());
}

double ecdf_left(const EmpiricalSample& sample, double x) {
    const auto& s = sample.sorted();
    const auto it = std::lower_bound(s.data(), s.data() + s.size(), x);
    return static_cast<double>(it - s.data()) / static_cast<double>(s.size());
}

Eigen::Index quantile_rank(Eigen::Index n, double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("quantile level p must lie in (0, 1)");
    const double np = static_cast<double>(n) * p;
    const double nearest = std::round(np);
    const double k = std::abs(np - nearest) <= 1e-9 * std::max(1.0, np) ? nearest : std::ceil(np);
    return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(k), 1, n);
}

double sample_quantile(const EmpiricalSample& sample, double p) {
    return sample.order_statistic(quantile_rank(sample.size(), p));
}

double conditional_cdf(const EmpiricalSample& sample, const InnovationModel& innovation, double x) {
    const auto& lag = sample.lagged_locations();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < lag.size(); ++i) sum += innovation.cdf(x - lag[i]);
    return sum / static_cast<double>(lag.size());
}

double conditional_density(const EmpiricalSample& sample, const InnovationModel& innovation, double x) {
    const auto& lag = sample.lagged_locations();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < lag.size(); ++i) sum += innovation.pdf(x - lag[i]);
    return sum / static_cast<double>(lag.size());
}

double conditional_density_deriv(const EmpiricalSample& sample, const InnovationModel& innovation, double x) {
    const auto& lag = sample.lagged_locations();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < lag.size(); ++i) sum += innovation.pdf_deriv(x - lag[i], 1);
    return sum / static_cast<double>(lag.size());
}

Decomposition decompose(const EmpiricalSample& sample, const InnovationModel& innovation,
                        const MarginalDistribution& F, double x) {
    const double star = conditional_cdf(sample, innovation, x);
    return {ecdf_eval(sample, x) - star, star - F.cdf(x)};
}

double sup_deviation(const EmpiricalSample& sample, const MarginalDistribution& F, double l, double u,
                     int grid_size) {
    if (!(l <= u)) throw InvalidParameter("sup_deviation needs l <= u");
    if (l == u) return std::abs(ecdf_eval(sample, l) - F.cdf(l));
    if (grid_size < 2) throw InvalidParameter("sup_deviation needs grid_size >= 2");

    double sup = 0.0;
    for (int k = 0; k < grid_size; ++k) {
        const double x = l + (u - l) * k / (grid_size - 1);
        sup = std::max(sup, std::abs(ecdf_eval(sample, x) - F.cdf(x)));
    }
    const auto& s = sample.sorted();
    const double n = static_cast<double>(s.size());
    auto first = std::lower_bound(s.data(), s.data() + s.size(), l);
    auto last = std::upper_bound(s.data(), s.data() + s.size(), u);
    for (auto it = first; it != last;) {
        // One visit per distinct value: F_n jumps from lo/n to hi/n at *it.
        const double t = *it;
        const double lo = static_cast<double>(it - s.data());
        while (it != last && *it == t) ++it;
        const double hi = static_cast<double>(it - s.data());
        const double Ft = F.cdf(t);
        sup = std::max({sup, std::abs(hi / n - Ft), std::abs(lo / n - Ft)});
    }
    return sup;
}

double oscillation_modulus(const std::function<double(double)>& D, double x, double b, int grid_size,
                           const std::vector<double>& extra_points) {
    if (!(b >= 0.0)) throw InvalidParameter("oscillation window must be >= 0");
    if (b == 0.0) return 0.0;
    if (grid_size < 2) throw InvalidParameter("oscillation grid_size must be >= 2");
    const double center = D(x);
    double sup = 0.0;
    for (int k = 0; k < grid_size; ++k) {
        const double u = -b + 2.0 * b * k / (grid_size - 1);
        sup = std::max(sup, std::abs(D(x + u) - center));
    }
    for (double t : extra_points) {
        if (std::abs(t - x) <= b) sup = std::max(sup, std::abs(D(t) - center));
    }
    return sup;
}

double step_oscillation_modulus(const EmpiricalSample& sample, const std::function<double(double)>& G, double x,
                                double b, int grid_size) {
    if (!(b >= 0.0)) throw InvalidParameter("oscillation window must be >= 0");
    if (b == 0.0) return 0.0;
    if (grid_size < 2) throw InvalidParameter("oscillation grid_size must be >= 2");
    const double center = ecdf_eval(sample, x) - G(x);
    double sup = 0.0;
    for (int k = 0; k < grid_size; ++k) {
        const double t = x - b + 2.0 * b * k / (grid_size - 1);
        sup = std::max(sup, std::abs(ecdf_eval(sample, t) - G(t) - center));
    }
    const auto& s = sample.sorted();
    const double n = static_cast<double>(s.size());
    auto first = std::lower_bound(s.data(), s.data() + s.size(), x - b);
    auto last = std::upper_bound(s.data(), s.data() + s.size(), x + b);
    for (auto it = first; it != last;) {
        const double t = *it;
        const double lo = static_cast<double>(it - s.data());
        while (it != last && *it == t) ++it;
        const double hi = static_cast<double>(it - s.data());
        const double g = G(t);
        sup = std::max(sup, std::abs(hi / n - g - center));
        // The left limit is only reached from inside the window.
        if (t > x - b) sup = std::max(sup, std::abs(lo / n - g - center));
    }
    return sup;
}

namespace {

struct TrimBounds {
    Eigen::Index alpha;
    Eigen::Index beta;
};

TrimBounds trim_bounds(const EmpiricalSample& sample, double p0, double p1) {
    if (!(p0 > 0.0 && p0 < p1 && p1 < 1.0)) throw InvalidParameter("trimming needs 0 < p0 < p1 < 1");
    const double n = static_cast<double>(sample.size());
    const auto a = static_cast<Eigen::Index>(std::floor(n * p0));
    const auto b = static_cast<Eigen::Index>(std::floor(n * p1));
    if (b <= a) throw DegenerateTrim("floor(n p1) <= floor(n p0); sample too small for this trim");
    return {a, b};
}

}  // namespace

double trimmed_mean(const EmpiricalSample& sample, double p0, double p1) {
    const auto [a, b] = trim_bounds(sample, p0, p1);
    return sample.sorted().segment(a, b - a).sum() / static_cast<double>(b - a);
}

double winsorized_mean(const EmpiricalSample& sample, double p0, double p1, WinsorVariant variant) {
    const auto [a, b] = trim_bounds(sample, p0, p1);
    const Eigen::Index n = sample.size();
    const Eigen::Index upper_rank = variant == WinsorVariant::display ? b : std::min(b + 1, n);
    double total = sample.sorted().segment(a, b - a).sum();
    if (a > 0) total += static_cast<double>(a) * sample.order_statistic(a);
    if (n > b) total += static_cast<double>(n - b) * sample.order_statistic(upper_rank);
    return total / static_cast<double>(n);
}

void write_sample_csv(const EmpiricalSample& sample, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "x\n";
    char buf[64];
    for (Eigen::Index i = 0; i < sample.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\n", sample.values()[i]);
        out << buf;
    }
}

EmpiricalSample read_sample_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "x") throw std::runtime_error(path.string() + ": expected header 'x'");
    std::vector<double> xs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t used = 0;
        xs.push_back(std::stod(line, &used));
        if (used != line.size()) throw std::runtime_error(path.string() + ": malformed value '" + line + "'");
    }
    return EmpiricalSample(Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())));
}

}  // namespace bahadur
