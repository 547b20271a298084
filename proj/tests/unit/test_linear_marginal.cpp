#include "bahadur/errors.hpp"
#include "bahadur/linear_process.hpp"
#include "bahadur/marginal.hpp"
#include "bahadur/rates.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace bahadur;

TEST_CASE("iid schedule reproduces the innovations") {
    const auto path = simulate_path(CoefficientSchedule::iid(), InnovationModel::student_t(3.0), 500, 1e-4, 9);
    CHECK(path.truncation.lag == 0);
    CHECK(path.values == Eigen::VectorXd(path.current_innovations()));
    CHECK((path.lagged_locations.array() == 0.0).all());
}

TEST_CASE("values are lagged locations plus current shocks") {
    for (const auto& s : {CoefficientSchedule::geometric(0.5), CoefficientSchedule::lrd(0.7)}) {
        const auto path = simulate_path(s, InnovationModel::gaussian(), 2000, 1e-3, 3);
        CHECK(path.values == Eigen::VectorXd(path.lagged_locations + path.current_innovations()));
    }
}

TEST_CASE("filtering matches a direct convolution") {
    // M = 300 takes the FFT route, M = 100 the direct one.
    for (std::int64_t M : {100, 300, 5000}) {
        const auto s = CoefficientSchedule::lrd(0.65);
        const std::int64_t n = 777;
        const auto path = simulate_path(s, InnovationModel::logistic(), n, Truncation{M, 0.0, true}, 17);
        const Eigen::VectorXd a = s.coefficients(M);
        REQUIRE(path.innovations.size() == n + M);
        double worst = 0.0;
        for (std::int64_t k = 1; k <= n; ++k) {
            double x = 0.0;
            for (std::int64_t i = 0; i <= M; ++i) x += a[i] * path.innovations[k - i + M - 1];
            worst = std::max(worst, std::abs(x - path.values[k - 1]));
        }
        INFO("M = " << M);
        CHECK(worst < 1e-11);
    }
}

TEST_CASE("simulation is deterministic per seed") {
    const auto s = CoefficientSchedule::lrd(0.6);
    const auto a = simulate_path(s, InnovationModel::gaussian(), 4096, 1e-3, 77);
    const auto b = simulate_path(s, InnovationModel::gaussian(), 4096, 1e-3, 77);
    const auto c = simulate_path(s, InnovationModel::gaussian(), 4096, 1e-3, 78);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("truncation lag") {
    const auto eps = InnovationModel::gaussian();
    const auto t = choose_truncation(CoefficientSchedule::geometric(0.5), eps, 100, 1e-4);
    CHECK(t.lag == 14);  // 0.5^14 < 1e-4 <= 0.5^13
    CHECK(t.met);
    const auto l = choose_truncation(CoefficientSchedule::lrd(0.6), eps, 100, 1e-4, 1 << 12);
    CHECK(l.lag == 1 << 12);
    CHECK_FALSE(l.met);
    const auto big = choose_truncation(CoefficientSchedule::lrd(0.9), eps, 1 << 16, 1e-2);
    CHECK(big.lag == 1 << 16);  // never shorter than n
}

TEST_CASE("geometric lag-1 autocorrelation") {
    const auto path = simulate_path(CoefficientSchedule::geometric(0.5), InnovationModel::gaussian(), 100'000, 1e-8, 5);
    const Eigen::ArrayXd x = path.values.array() - path.values.mean();
    const double r1 = (x.head(x.size() - 1) * x.tail(x.size() - 1)).sum() / x.square().sum();
    // gamma(1)/gamma(0) = (sum a_i a_{i+1}) / (sum a_i^2) = (2/3) / (4/3).
    CHECK(std::abs(r1 - 0.5) < 0.01);
}

TEST_CASE("lrd partial sums have the exact truncated variance") {
    const std::int64_t n = 1 << 14;
    const auto s = CoefficientSchedule::lrd(0.75);
    const Truncation t{n, 0.0, true};
    const double exact = partial_sum_variance(s, 1.0, n, n);
    LinearProcessSimulator sim(s, InnovationModel::gaussian(), n, t);
    const int reps = 3000;
    double ss = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double total = sim.simulate(1000 + r).values.sum();
        ss += total * total;
    }
    CHECK(std::abs(ss / reps / exact - 1.0) < 0.05);
}

TEST_CASE("iid oracle is the innovation law") {
    const auto eps = InnovationModel::student_t(3.0);
    const auto o = build_marginal_oracle(CoefficientSchedule::iid(), eps, 1000, 0, 1);
    CHECK(o.exact());
    for (double x : {-3.0, -0.2, 0.0, 1.4}) {
        CHECK(o.cdf(x) == eps.cdf(x));
        CHECK(o.pdf(x) == eps.pdf(x));
    }
    CHECK(o.precision() == 0.0);
}

TEST_CASE("geometric gaussian oracle against the exact N(0, 4/3) marginal") {
    const auto o = build_marginal_oracle(CoefficientSchedule::geometric(0.5), InnovationModel::gaussian(), 200'000, 14, 1);
    CHECK(std::abs(o.quantile(0.5)) < 1e-3);
    CHECK(std::abs(o.pdf(0.0) - 0.345494149471335) <= 3.0 * o.precision());
    const double sd = std::sqrt(4.0 / 3.0);
    for (double x : {-2.0, -0.7, 0.3, 1.1}) {
        CHECK(std::abs(o.cdf(x) - 0.5 * std::erfc(-x / (sd * std::sqrt(2.0)))) <= 4.0 * o.standard_error(x) + 1e-12);
    }
}

TEST_CASE("oracle derivatives are consistent") {
    const auto o = build_marginal_oracle(CoefficientSchedule::polynomial_srd(2.0), InnovationModel::student_t(3.0),
                                         20'000, 50, 4);
    const double h = 1e-4;
    for (double x : {-1.5, 0.1, 0.9}) {
        CHECK(o.pdf(x) == doctest::Approx((o.cdf(x + h) - o.cdf(x - h)) / (2 * h)).epsilon(1e-6));
        CHECK(o.pdf_deriv(x) == doctest::Approx((o.pdf(x + h) - o.pdf(x - h)) / (2 * h)).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("simulated marginal passes KS against the oracle") {
    const auto s = CoefficientSchedule::geometric(0.5);
    const auto eps = InnovationModel::logistic();
    const auto o = build_marginal_oracle(s, eps, 100'000, 20, 8);
    const Truncation t = choose_truncation(s, eps, 8, 1e-6);
    LinearProcessSimulator sim(s, eps, 8, t);
    const int count = 100'000;
    Eigen::VectorXd x(count);
    for (int r = 0; r < count; ++r) x[r] = sim.simulate(static_cast<std::uint64_t>(r) * 7919 + 1).values[7];
    CHECK(testing::ks_distance(x, [&](double v) { return o.cdf(v); }) <= testing::ks_critical(count));
}

TEST_CASE("tabulated marginal interpolates its source") {
    auto src = std::make_shared<InnovationMarginal>(InnovationModel::gaussian());
    const auto table = MarginalTable::tabulate(src, -3.0, 3.0, 2001);
    for (double x : {-2.7, -0.01, 0.5, 2.2}) {
        CHECK(table.cdf(x) == doctest::Approx(src->cdf(x)).epsilon(1e-9));
        CHECK(table.pdf(x) == doctest::Approx(src->pdf(x)).epsilon(1e-7));
    }
    CHECK(table.quantile(0.8) == doctest::Approx(src->quantile(0.8)).epsilon(1e-8));
}

TEST_CASE("far-past covariance sums") {
    // Reference values: direct sums plus Euler-Maclaurin tails in mpmath.
    CHECK(far_past_covariance(CoefficientSchedule::lrd(0.6), 1000, 1.0, 1.0) ==
          doctest::Approx(1.2558176465520766).epsilon(1e-9));
    CHECK(far_past_covariance(CoefficientSchedule::lrd(0.75), 50, 3.0, 20.0) ==
          doctest::Approx(0.2568244827949641).epsilon(1e-9));
    CHECK(far_past_covariance(CoefficientSchedule::lrd(0.8, SlowlyVarying::log_power(0.5)), 100, 1.0, 1.0) ==
          doctest::Approx(0.6591487780621804).epsilon(1e-9));
    CHECK_THROWS_AS(far_past_covariance(CoefficientSchedule::geometric(0.5), 10, 1.0, 1.0), InvalidParameter);
}

TEST_CASE("far-past compensation restores the untruncated second moments") {
    // beta = 0.75: Var X = 1 + zeta(3/2), Cov(X_1, X_128) = sum_i a_i a_{i+127},
    // Var(X_1 + ... + X_128) from the exact autocovariances (mpmath).
    const auto s = CoefficientSchedule::lrd(0.75);
    const std::int64_t n = 128;
    Truncation t{64, 0.0, false, FarPast::gaussian};
    LinearProcessSimulator sim(s, InnovationModel::gaussian(), n, t);
    const int reps = 20'000;
    double v1 = 0.0, vn = 0.0, c = 0.0, vs = 0.0;
    for (int r = 0; r < reps; ++r) {
        const auto x = sim.simulate(50'000 + r).values;
        v1 += x[0] * x[0];
        vn += x[n - 1] * x[n - 1];
        c += x[0] * x[n - 1];
        vs += x.sum() * x.sum();
    }
    CHECK(std::abs(v1 / reps / 3.6123753486854883 - 1.0) < 0.05);
    CHECK(std::abs(vn / reps / 3.6123753486854883 - 1.0) < 0.05);
    CHECK(std::abs(c / reps - 0.4008593292156612) < 0.1);
    CHECK(std::abs(vs / reps / 14281.171667590617 - 1.0) < 0.05);

    SUBCASE("path identities still hold") {
        const auto p = sim.simulate(3);
        CHECK(p.values == Eigen::VectorXd(p.lagged_locations + p.current_innovations()));
        CHECK(sim.simulate(3).values == p.values);
    }
    SUBCASE("requires a long-memory schedule and finite variance") {
        const Truncation g{14, 0.0, true, FarPast::gaussian};
        CHECK_THROWS_AS(LinearProcessSimulator(CoefficientSchedule::geometric(0.5), InnovationModel::gaussian(), 8, g),
                        InvalidParameter);
        CHECK_THROWS_AS(LinearProcessSimulator(s, InnovationModel::student_t(1.5), 8, t), InvalidParameter);
    }
}

TEST_CASE("far-past oracle matches the untruncated marginal") {
    // Gaussian innovations: X ~ N(0, 1 + zeta(1.2)) exactly.
    const auto s = CoefficientSchedule::lrd(0.6);
    const auto o = build_marginal_oracle(s, InnovationModel::gaussian(), 200'000, 256, 5, FarPast::gaussian);
    const double sd = std::sqrt(1.0 + 5.591582441177749);
    for (double x : {-3.0, -1.0, 0.4, 2.5}) {
        CHECK(std::abs(o.cdf(x) - 0.5 * std::erfc(-x / (sd * std::sqrt(2.0)))) <= 4.0 * o.standard_error(x) + 1e-12);
    }

    const auto eps = InnovationModel::logistic();
    const auto lo = build_marginal_oracle(s, eps, 20'000, 256, 6, FarPast::gaussian);
    LinearProcessSimulator sim(s, eps, 512, Truncation{256, 0.0, false, FarPast::gaussian});
    Eigen::VectorXd x(4000);
    for (Eigen::Index r = 0; r < x.size(); ++r) x[r] = sim.simulate(900 + r).values[r % 512];
    CHECK(testing::ks_distance(x, [&](double v) { return lo.cdf(v); }) <= testing::ks_critical(x.size()));
}
