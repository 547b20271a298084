#include "bahadur/errors.hpp"
#include "bahadur/innovations.hpp"
#include "bahadur/special.hpp"
#include "support.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

using namespace bahadur;

namespace {

std::vector<InnovationModel> all_models() {
    return {InnovationModel::gaussian(), InnovationModel::uniform(), InnovationModel::uniform_smoothwrap(),
            InnovationModel::student_t(3.0), InnovationModel::logistic()};
}

}  // namespace

TEST_CASE("gaussian draws have unit mean and variance") {
    RandomStream stream(11);
    const Eigen::VectorXd x = sample(InnovationModel::gaussian(), stream, 1'000'000);
    const double mean = x.mean();
    const double var = (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
    CHECK(std::abs(mean) < 4e-3);
    CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("same seed gives the same draws") {
    for (const auto& m : all_models()) {
        RandomStream a(42), b(42);
        CHECK(sample(m, a, 1000) == sample(m, b, 1000));
    }
}

TEST_CASE("student t tail frequency beyond 10") {
    // 2 * P(T_3 > 10), from an independent quadrature.
    const double two_sided = 0.00212839905841415;
    RandomStream stream(7);
    const Eigen::Index count = 1'000'000;
    const Eigen::VectorXd x = sample(InnovationModel::student_t(3.0), stream, count);
    const double freq = static_cast<double>((x.array().abs() > 10.0).count()) / static_cast<double>(count);
    const double se = std::sqrt(two_sided * (1.0 - two_sided) / static_cast<double>(count));
    CHECK(std::abs(freq - two_sided) < 3.0 * se);
}

TEST_CASE("closed-form values") {
    CHECK(InnovationModel::gaussian().cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(InnovationModel::gaussian().pdf_deriv(0.0, 1) == 0.0);
    CHECK(InnovationModel::student_t(3.0).pdf(0.0) == doctest::Approx(0.367552596947861).epsilon(1e-13));
}

TEST_CASE("student t cdf and quantile against frozen reference values") {
    const std::array<double, 3> nus = {1.5, 3.0, 5.0};
    const std::array<double, 5> xs = {-7.5, -1.3, 0.4, 2.2, 40.0};
    const double cdfs[3][5] = {
        {0.018101574305445747, 0.1790146956007904, 0.630639530998568, 0.9002028109551108, 0.9985101878045344},
        {0.0024554874629941523, 0.14223375436394847, 0.6420324230128149, 0.9424140240117647, 0.9999828096596054},
        {0.00033312662448309, 0.12515031708533858, 0.6471634425834427, 0.9604530510484088, 0.9999999079401891}};
    const std::array<double, 5> us = {1e-6, 0.05, 0.3, 0.9, 0.999999};
    const double qs[3][5] = {
        {-5219.469324709013, -3.705180820160006, -0.6517954826023762, 2.1963984175668427, 5219.469324608953},
        {-103.29946778041938, -2.3533634348018273, -0.5843897274398188, 1.6377443536962095, 103.29946777942902},
        {-24.771029720535676, -2.0150483733330233, -0.5594296444681034, 1.4758840488558216, 24.771029720392217}};
    for (std::size_t i = 0; i < nus.size(); ++i) {
        const auto t = InnovationModel::student_t(nus[i]);
        for (std::size_t j = 0; j < xs.size(); ++j) {
            CHECK(t.cdf(xs[j]) == doctest::Approx(cdfs[i][j]).epsilon(1e-10));
            CHECK(t.quantile(us[j]) == doctest::Approx(qs[i][j]).epsilon(1e-8));
        }
    }
}

TEST_CASE("pdf matches the central difference of the cdf") {
    const double h = 1e-4;
    for (const auto& m : all_models()) {
        const bool jumps = m.family() == Family::uniform;
        const double lo = jumps ? -0.5 : -8.0, hi = jumps ? 1.5 : 8.0;
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const double x = lo + (hi - lo) * (k + 0.5) / 1000.0;
            // The uniform density jumps at 0 and 1; the difference quotient cannot see a jump.
            if (jumps && (std::abs(x) <= h || std::abs(x - 1.0) <= h)) continue;
            const double fd = (m.cdf(x + h) - m.cdf(x - h)) / (2.0 * h);
            worst = std::max(worst, std::abs(m.pdf(x) - fd));
        }
        INFO(m.describe());
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("pdf derivative matches the central difference of the pdf") {
    const double h = 1e-5;
    for (const auto& m : {InnovationModel::gaussian(2.0), InnovationModel::student_t(1.5), InnovationModel::logistic(),
                          InnovationModel::uniform_smoothwrap()}) {
        for (double x : {-2.1, -0.3, 0.2, 0.45, 1.7}) {
            const double fd = (m.pdf(x + h) - m.pdf(x - h)) / (2.0 * h);
            CHECK(m.pdf_deriv(x, 1) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            const double fd2 = (m.pdf_deriv(x + h, 1) - m.pdf_deriv(x - h, 1)) / (2.0 * h);
            CHECK(m.pdf_deriv(x, 2) == doctest::Approx(fd2).epsilon(1e-4).scale(1.0));
        }
    }
}

TEST_CASE("draws pass a KS test for every family") {
    for (const auto& m : all_models()) {
        RandomStream stream(2024);
        const Eigen::VectorXd x = sample(m, stream, 100'000);
        INFO(m.describe());
        CHECK(testing::ks_distance(x, [&](double t) { return m.cdf(t); }) <= testing::ks_critical(1e5));
    }
}

TEST_CASE("heavy-tailed student t draws pass a KS test") {
    for (double nu : {0.7, 1.5, 12.0}) {
        const auto m = InnovationModel::student_t(nu, 2.0);
        RandomStream stream(77);
        const Eigen::VectorXd x = sample(m, stream, 100'000);
        INFO(m.describe());
        CHECK(testing::ks_distance(x, [&](double t) { return m.cdf(t); }) <= testing::ks_critical(1e5));
    }
}

TEST_CASE("declared moment order") {
    CHECK(InnovationModel::student_t(3.0).alpha_moment() < 3.0);
    CHECK(InnovationModel::student_t(3.0).alpha_moment() > 2.99);
    CHECK(std::isinf(InnovationModel::gaussian().alpha_moment()));
    CHECK(std::isinf(InnovationModel::student_t(1.5).variance()));
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(InnovationModel::gaussian(0.0), InvalidParameter);
    CHECK_THROWS_AS(InnovationModel::student_t(-1.0), InvalidParameter);
    CHECK_THROWS_AS(family_from_string("cauchy"), InvalidParameter);
}
