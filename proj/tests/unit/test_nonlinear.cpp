#include "bahadur/empirical.hpp"
#include "bahadur/errors.hpp"
#include "bahadur/nonlinear_process.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace bahadur;

TEST_CASE("ar1 with a = 0 outputs the innovations") {
    const auto eps = InnovationModel::gaussian();
    const auto model = IteratedMapModel::ar1(0.0, eps, 25);
    const std::uint64_t seed = 31;
    const Eigen::VectorXd x = simulate_chain(model, 1000, seed);
    RandomStream stream(seed);
    for (int i = 0; i < 25; ++i) eps.draw(stream);  // burn-in
    CHECK(x == sample(eps, stream, 1000));
}

TEST_CASE("ar1 stationary variance") {
    const Eigen::VectorXd x = simulate_chain(IteratedMapModel::ar1(0.5, InnovationModel::gaussian()), 100'000, 2);
    const double var = (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
    CHECK(std::abs(var / (1.0 / 0.75) - 1.0) < 0.02);
}

TEST_CASE("arch1 mean is zero") {
    const Eigen::VectorXd x = simulate_chain(IteratedMapModel::arch1(1.0, 0.3, InnovationModel::gaussian()), 100'000, 5);
    const double mean = x.mean();
    const double se = std::sqrt((x.array() - mean).square().sum() / (x.size() - 1.0) / x.size());
    // A crude SE; the chain is uncorrelated in levels, so it is the right one here.
    CHECK(std::abs(mean) < 4.0 * se);
}

TEST_CASE("map parameter checks") {
    const auto eps = InnovationModel::gaussian();
    CHECK_THROWS_AS(IteratedMapModel::ar1(1.0, eps), InvalidParameter);
    CHECK_THROWS_AS(IteratedMapModel::arch1(1.0, 0.0, eps), InvalidParameter);
    CHECK_THROWS_AS(IteratedMapModel::arch1(1.0, 5.0, eps), InvalidParameter);
    CHECK_THROWS_AS(IteratedMapModel::tar(1.2, 0.1, eps), InvalidParameter);
    CHECK_NOTHROW(IteratedMapModel::tar(0.7, -0.4, eps));
    // E log|Z| = -(gamma + log 2) / 2 for standard normal Z.
    CHECK(IteratedMapModel::arch1(1.0, 1.0, eps).log_lipschitz_mean() ==
          doctest::Approx(-0.6351814227307392).epsilon(1e-9));
    CHECK(IteratedMapModel::arch1(1.0, 4.0, InnovationModel::uniform()).log_lipschitz_mean() ==
          doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("gmc of ar1") {
    const auto eps = InnovationModel::gaussian();
    SUBCASE("a = 0.5") {
        const auto r = estimate_gmc(IteratedMapModel::ar1(0.5, eps), 2.0, 40, 1000, 3);
        CHECK(std::abs(r.r_hat - 0.25) <= 0.03);
        // E|X_4 - X'_4|^2 = a^8 * 2 Var(X).
        CHECK(std::abs(r.mean_distance[4] / (std::pow(0.25, 4) * 2.0 / 0.75) - 1.0) <= 0.10);
    }
    SUBCASE("a = 0 forgets in one step") {
        const auto r = estimate_gmc(IteratedMapModel::ar1(0.0, eps), 1.0, 10, 100, 3);
        CHECK(r.mean_distance[0] > 0.0);
        CHECK((r.mean_distance.tail(10).array() == 0.0).all());
        CHECK(r.degenerate);
        CHECK(r.usable_lags == 1);
    }
    SUBCASE("log-distance regression is linear") {
        const auto r = estimate_gmc(IteratedMapModel::ar1(0.6, eps), 2.0, 40, 1000, 9);
        const Eigen::Index k = r.usable_lags;
        REQUIRE(k >= 5);
        Eigen::ArrayXd lag = Eigen::ArrayXd::LinSpaced(k, 0.0, k - 1.0);
        Eigen::ArrayXd y = r.mean_distance.head(k).array().log();
        const Eigen::ArrayXd fit = r.intercept + r.slope * lag;
        const double r2 = 1.0 - (y - fit).square().sum() / (y - y.mean()).square().sum();
        CHECK(r2 >= 0.99);
    }
    CHECK_THROWS_AS(estimate_gmc(IteratedMapModel::ar1(0.5, InnovationModel::student_t(1.5)), 2.0, 10, 100, 1),
                    InvalidParameter);
}

TEST_CASE("block indices") {
    CHECK(block_indices(10, 3, 1) == std::vector<std::int64_t>{1, 4, 7, 10});
    CHECK(block_indices(10, 3, 2) == std::vector<std::int64_t>{2, 5, 8});
    CHECK_THROWS_AS(block_indices(10, 3, 4), IndexError);
    CHECK_THROWS_AS(block_indices(10, 3, 0), IndexError);
    const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(10, 1.0, 10.0);
    CHECK(block_ecdf(v, 3, 1, 1e300) == 1.0);
}

TEST_CASE("block ECDFs recombine into the plain ECDF") {
    RandomStream stream(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::int64_t n = 5 + static_cast<std::int64_t>(stream.next_u64() % 200);
        const std::int64_t m = 1 + static_cast<std::int64_t>(stream.next_u64() % static_cast<std::uint64_t>(n - 1));
        const Eigen::VectorXd v = sample(InnovationModel::gaussian(), stream, n);
        const double x = InnovationModel::gaussian().quantile(stream.uniform());
        double combined = 0.0;
        for (std::int64_t j = 1; j <= m; ++j) {
            const double size = static_cast<double>(block_indices(n, m, j).size());  // 1 + A_n(j)
            combined += size * block_ecdf(v, m, j, x);
        }
        combined /= static_cast<double>(n);
        const double plain = static_cast<double>((v.array() <= x).count()) / static_cast<double>(n);
        CHECK(combined == doctest::Approx(plain).epsilon(1e-14));
    }
}

TEST_CASE("m-dependent coupling") {
    const auto model = IteratedMapModel::ar1(0.5, InnovationModel::gaussian());
    const std::int64_t n = 10'000;
    const auto p = simulate_m_dependent(model, n, 40, 12);
    SUBCASE("same marginal") {
        CHECK(testing::ks_two_sample(p.coupled, p.original) <= testing::ks_critical(n, n));
    }
    SUBCASE("uncorrelated beyond m") {
        const std::int64_t lag = 45;
        const Eigen::ArrayXd x = p.coupled.array() - p.coupled.mean();
        const double c = (x.head(n - lag) * x.tail(n - lag)).mean() / x.square().mean();
        CHECK(std::abs(c) <= 4.0 / std::sqrt(static_cast<double>(n - lag)));
    }
    SUBCASE("gap contracts with m") {
        const double gap40 = (p.coupled - p.original).cwiseAbs().maxCoeff();
        const auto p10 = simulate_m_dependent(model, n, 10, 12);
        const double gap10 = (p10.coupled - p10.original).cwiseAbs().maxCoeff();
        // |Xt_k - X_k| = a^m |start gap|; starts differ by at most ~12 sd.
        CHECK(gap40 <= std::pow(0.5, 40) * 12.0 * std::sqrt(4.0 / 3.0));
        CHECK(gap10 <= std::pow(0.5, 10) * 12.0 * std::sqrt(4.0 / 3.0));
        CHECK(gap40 < gap10);
    }
    SUBCASE("deterministic per seed") {
        const auto q = simulate_m_dependent(model, n, 40, 12);
        CHECK(q.coupled == p.coupled);
        CHECK(q.original == p.original);
    }
}

TEST_CASE("chain oracle matches the exact ar1 marginal") {
    const auto model = IteratedMapModel::ar1(0.5, InnovationModel::gaussian());
    const auto o = build_chain_oracle(model, 100'000, 6);
    const double sd = std::sqrt(1.0 / 0.75);
    for (double x : {-1.5, 0.0, 0.4, 2.0}) {
        CHECK(std::abs(o.cdf(x) - 0.5 * std::erfc(-x / (sd * std::sqrt(2.0)))) <= 4.0 * o.standard_error(x) + 1e-12);
    }
}

TEST_CASE("chain marginal passes KS against the chain oracle") {
    const auto model = IteratedMapModel::arch1(1.0, 0.3, InnovationModel::gaussian(), 200);
    const auto o = build_chain_oracle(model, 20'000, 77);
    Eigen::VectorXd x(3'000);
    for (Eigen::Index r = 0; r < x.size(); ++r) x[r] = simulate_chain(model, 1, 500 + r)[0];
    CHECK(testing::ks_distance(x, [&](double v) { return o.cdf(v); }) <= testing::ks_critical(x.size()));
}
