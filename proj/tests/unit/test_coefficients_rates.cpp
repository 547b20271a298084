#include "bahadur/coefficients.hpp"
#include "bahadur/errors.hpp"
#include "bahadur/rates.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace bahadur;

TEST_CASE("coefficient values") {
    CHECK(CoefficientSchedule::geometric(0.5).coefficient(3) == 0.125);
    CHECK(CoefficientSchedule::lrd(0.6).coefficient(4) == doctest::Approx(0.435275281648062).epsilon(1e-13));
    CHECK(std::exp(-0.6 * std::log(4.0)) == doctest::Approx(0.435275281648062).epsilon(1e-13));
    for (const auto& s : {CoefficientSchedule::iid(), CoefficientSchedule::geometric(0.3),
                          CoefficientSchedule::polynomial_srd(2.5), CoefficientSchedule::lrd(0.8)}) {
        CHECK(s.coefficient(0) == 1.0);
    }
    CHECK(CoefficientSchedule::iid().coefficient(5) == 0.0);
}

TEST_CASE("tail sums") {
    CHECK(CoefficientSchedule::geometric(0.5).tail_abs_sum(2, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (std::int64_t n : {1, 3, 100}) {
        CHECK(CoefficientSchedule::iid().tail_abs_sum(n, 1.0) == 0.0);
        CHECK(CoefficientSchedule::iid().tail_abs_sum(n, 0.5) == 0.0);
    }
    CHECK_THROWS_AS(CoefficientSchedule::lrd(0.6).tail_abs_sum(1, 1.0), DivergentTail);

    // zeta(3) and zeta(3) - sum_{i<5} i^-3.
    const auto p3 = CoefficientSchedule::polynomial_srd(3.0);
    CHECK(p3.tail_abs_sum(1, 1.0) == doctest::Approx(1.2020569031595942).epsilon(1e-9));
    CHECK(p3.tail_abs_sum(5, 1.0) == doctest::Approx(0.0243948661225572).epsilon(1e-8));
    // zeta(1.5) - 1 for |a_i|^{1/2} with r = 3.
    CHECK(p3.tail_abs_sum(2, 0.5) == doctest::Approx(2.6123753486854883 - 1.0).epsilon(1e-8));
}

TEST_CASE("parameter checks") {
    CHECK_THROWS_AS(CoefficientSchedule::lrd(1.2), InvalidParameter);
    CHECK_THROWS_AS(CoefficientSchedule::lrd(0.5), InvalidParameter);
    CHECK_THROWS_AS(CoefficientSchedule::geometric(1.0), InvalidParameter);
    CHECK_THROWS_AS(CoefficientSchedule::polynomial_srd(1.0), InvalidParameter);
}

TEST_CASE("lrd exponent") {
    CHECK(lrd_exponent(0.6) == doctest::Approx(-0.3).epsilon(1e-14));
    CHECK(-0.7 / 2.0 - 0.25 == doctest::Approx(1.5 - 3.0 * 0.7).epsilon(1e-14));
    CHECK(lrd_exponent(0.7) == doctest::Approx(-0.6).epsilon(1e-14));
    RateParams params;
    params.beta = 0.6;
    CHECK(rate_function(RateKind::lrd_exponent, 1, params) == lrd_exponent(0.6));
}

TEST_CASE("c_beta equals the Beta function B(1 - beta, 2 beta - 1)") {
    CHECK(c_beta(0.75) == doctest::Approx(5.24411510858424).epsilon(1e-9));
    CHECK(c_beta(0.6) == doctest::Approx(6.83808541293992).epsilon(1e-9));
    CHECK(c_beta(0.75, 2.0) == doctest::Approx(2.0 * 5.24411510858424).epsilon(1e-9));
}

TEST_CASE("rate functions reject small n and missing moments") {
    RateParams params;
    params.beta = 0.7;
    CHECK_THROWS_AS(rate_function(RateKind::kiefer_scale, 15, params), DomainError);
    CHECK_NOTHROW(rate_function(RateKind::kiefer_scale, 16, params));
    params.alpha_moment = 1.5;
    CHECK_THROWS_AS(rate_function(RateKind::sigma_n1_asym, 1024, params), DomainError);
    CHECK_THROWS_AS(rate_kind_from_string("nope"), InvalidParameter);
}

TEST_CASE("kiefer scale closed form") {
    RateParams params;
    const double n = 4096.0;
    CHECK(rate_function(RateKind::kiefer_scale, 4096, params) ==
          doctest::Approx(std::pow(n, -0.75) * std::pow(std::log(std::log(n)), 0.75)).epsilon(1e-14));
}

TEST_CASE("exact sigma_{n,1} approaches its asymptote for beta = 0.6") {
    RateParams params;
    params.beta = 0.6;
    std::vector<double> gap;
    for (int e = 12; e <= 18; ++e) {
        const std::int64_t n = std::int64_t{1} << e;
        const double ratio = rate_function(RateKind::sigma_n1_exact, n, params) /
                             rate_function(RateKind::sigma_n1_asym, n, params);
        gap.push_back(std::abs(ratio - 1.0));
    }
    CHECK(gap.back() < 0.10);
    for (std::size_t i = 1; i < gap.size(); ++i) CHECK(gap[i] < gap[i - 1]);
}

TEST_CASE("Psi_n / sqrt(n) regimes") {
    auto ratio = [](double beta, std::int64_t n) {
        RateParams params;
        params.beta = beta;
        return rate_function(RateKind::psi, n, params) / std::sqrt(static_cast<double>(n));
    };
    // beta = 3/4: partial sums of 1/k, growing by log 2 per doubling.
    for (int e = 12; e < 18; ++e) {
        const double step = ratio(0.75, std::int64_t{2} << e) - ratio(0.75, std::int64_t{1} << e);
        CHECK(step == doctest::Approx(std::log(2.0)).epsilon(1e-3));
    }
    // beta = 0.8: a convergent series; increments shrink by 2^{-0.1} per doubling.
    double prev = ratio(0.8, 1 << 13) - ratio(0.8, 1 << 12);
    for (int e = 13; e < 18; ++e) {
        const double step = ratio(0.8, std::int64_t{2} << e) - ratio(0.8, std::int64_t{1} << e);
        CHECK(step / prev == doctest::Approx(std::pow(2.0, -0.1)).epsilon(1e-3));
        prev = step;
    }
}

TEST_CASE("partial sum variance against brute-force sums") {
    const std::int64_t n = 1 << 10;
    SUBCASE("geometric autocovariances") {
        const double rho = 0.5;
        const double g0 = 1.0 / (1.0 - rho * rho);
        double expected = n * g0;
        for (std::int64_t h = 1; h < n; ++h) expected += 2.0 * (n - h) * g0 * std::pow(rho, static_cast<double>(h));
        CHECK(partial_sum_variance(CoefficientSchedule::geometric(rho), 1.0, n) ==
              doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("truncated lrd filter") {
        const auto s = CoefficientSchedule::lrd(0.75);
        const std::int64_t M = 3 * n;
        const Eigen::VectorXd a = s.coefficients(M);
        // Var = sum_j (sum_{i=1}^n a_{i-j})^2 over j = 1-M .. n.
        double expected = 0.0;
        for (std::int64_t j = 1 - M; j <= n; ++j) {
            double w = 0.0;
            for (std::int64_t i = std::max<std::int64_t>(1, j); i <= std::min(n, j + M); ++i) w += a[i - j];
            expected += w * w;
        }
        CHECK(partial_sum_variance(s, 1.0, n, M) == doctest::Approx(expected).epsilon(1e-10));
        CHECK(partial_sum_variance(s, 2.5, n, M) == doctest::Approx(2.5 * expected).epsilon(1e-10));
    }
}
