#include "bahadur/errors.hpp"
#include "bahadur/linear_process.hpp"
#include "bahadur/remainder.hpp"
#include "bahadur/statistics.hpp"

#include <doctest.h>

#include <cmath>

using namespace bahadur;

namespace {

EmpiricalSample lrd_sample(std::uint64_t seed, std::int64_t n = 512) {
    return EmpiricalSample::from_path(
        simulate_path(CoefficientSchedule::lrd(0.7), InnovationModel::gaussian(), n, Truncation{n, 0.0, true}, seed));
}

}  // namespace

TEST_CASE("remainder fields satisfy their defining identities") {
    const auto F = build_marginal_oracle(CoefficientSchedule::lrd(0.7), InnovationModel::gaussian(), 20'000, 512, 2);
    RandomStream stream(1);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = lrd_sample(50 + trial);
        const double p = 0.05 + 0.9 * stream.uniform();
        const auto d = remainder(s, p, F, true);
        CHECK(d.xi_np == sample_quantile(s, p));
        CHECK(d.xi_p == F.quantile(p));
        CHECK(d.linear_term == (p - ecdf_eval(s, d.xi_p)) / d.f_xi);
        CHECK(d.remainder_srd == d.xi_np - d.xi_p - d.linear_term);
        CHECK(d.remainder_lrd == d.remainder_srd - d.correction_term);
        CHECK(d.correction_term == d.mean * d.mean * d.fprime_xi / (2.0 * d.f_xi));
        CHECK(d.value() == d.remainder_lrd);
        const auto u = remainder(s, p, F, false);
        CHECK(u.value() == u.remainder_srd);
        CHECK(u.remainder_srd == d.remainder_srd);
    }
}

TEST_CASE("iid uniform remainder by direct substitution") {
    const InnovationMarginal F(InnovationModel::uniform());
    RandomStream stream(3);
    const EmpiricalSample s(sample(InnovationModel::uniform(), stream, 999));
    for (double p : {0.1, 0.5, 0.77}) {
        const auto d = remainder(s, p, F, false);
        CHECK(d.remainder_srd == doctest::Approx(sample_quantile(s, p) - p - (p - ecdf_eval(s, p))).epsilon(1e-15));
    }
}

TEST_CASE("stratified sample has a tiny remainder") {
    const InnovationMarginal F(InnovationModel::gaussian());
    const int n = 1001;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = F.quantile((i + 0.5) / n);
    const EmpiricalSample s(v);
    for (double p : {0.3, 0.5, 0.62}) {
        const auto d = remainder(s, p, F, false);
        CHECK(std::abs(d.remainder_srd) <= 1.0 / (2.0 * n * d.f_xi) + 10.0 / (1.0 * n * n));
    }
}

TEST_CASE("density floor") {
    const InnovationMarginal F(InnovationModel::gaussian());
    CHECK_NOTHROW(quantile_point(F, 0.5));
    const auto o = build_marginal_oracle(CoefficientSchedule::geometric(0.5), InnovationModel::gaussian(), 100, 10, 1);
    CHECK_THROWS_AS(quantile_point(o, 1e-12), DensityTooSmall);
}

TEST_CASE("uniform remainder grids") {
    const InnovationMarginal F(InnovationModel::gaussian());
    const auto s = lrd_sample(8, 300);
    SUBCASE("one point") {
        const auto u = uniform_remainder(s, std::vector<double>{0.4}, F, false);
        CHECK(u.sup == doctest::Approx(std::abs(remainder(s, 0.4, F, false).remainder_srd)).epsilon(1e-12));
    }
    SUBCASE("refinement never decreases the sup") {
        std::vector<double> coarse, fine;
        for (int i = 0; i <= 10; ++i) coarse.push_back(0.25 + 0.05 * i);
        for (int i = 0; i <= 100; ++i) fine.push_back(0.25 + 0.005 * i);
        CHECK(uniform_remainder(s, fine, F, false).sup >= uniform_remainder(s, coarse, F, false).sup);
        CHECK(uniform_remainder(s, uniform_grid(F, s.size(), 0.25, 0.75, 10), false).sup >=
              uniform_remainder(s, coarse, F, false).sup);
    }
    SUBCASE("grid size") {
        const auto g = uniform_grid(F, 10'000, 0.25, 0.75, 50);
        // 100 = ceil(sqrt(n)) levels plus jump levels 2500..7500.
        CHECK(g.size() == 100 + 5001);
    }
}

TEST_CASE("iid uniform sup remainder is of the optimal order") {
    const InnovationMarginal F(InnovationModel::uniform());
    const std::int64_t n = 1 << 14;
    const auto grid = uniform_grid(F, n, 0.25, 0.75, 200);
    Eigen::VectorXd sups(60);
    for (int r = 0; r < sups.size(); ++r) {
        RandomStream stream(900 + r);
        const EmpiricalSample s(sample(InnovationModel::uniform(), stream, n));
        sups[r] = uniform_remainder(s, grid, false).sup;
    }
    const double nd = static_cast<double>(n);
    const double order = std::pow(nd, -0.75) * std::sqrt(std::log(nd)) * std::pow(std::log(std::log(nd)), 0.25);
    const double m = median(sups);
    CHECK(m >= 0.2 * order);
    CHECK(m <= 5.0 * order);
}

TEST_CASE("kiefer constant") {
    CHECK(kiefer_limit(0.5, 1.0) == doctest::Approx(0.521694860024429).epsilon(1e-13));
    CHECK(kiefer_limit(0.2, 1.3) == doctest::Approx(kiefer_limit(0.8, 1.3)).epsilon(1e-15));
    CHECK(kiefer_limit(0.3, 2.0) == doctest::Approx(0.5 * kiefer_limit(0.3, 1.0)).epsilon(1e-15));
    CHECK(kiefer_limit(0.5 + 1e-9, 1.0) == doctest::Approx(kiefer_limit(0.5, 1.0)).epsilon(1e-12));
}

TEST_CASE("expansion identity S_n = n M_n + H_n") {
    const auto eps = InnovationModel::gaussian();
    const auto F = build_marginal_oracle(CoefficientSchedule::lrd(0.7), eps, 20'000, 512, 3);
    const auto s = lrd_sample(21);
    RandomStream stream(2);
    for (int i = 0; i < 100; ++i) {
        const double y = 4.0 * (stream.uniform() - 0.5);
        const auto e = expansion_remainder(s, eps, F, y);
        CHECK(e.S - e.H == doctest::Approx(e.nM).epsilon(1e-12).scale(1.0));
    }
    SUBCASE("iid path: H_n = n f(y) Xbar_n") {
        const InnovationMarginal G(eps);
        const auto iid = EmpiricalSample::from_path(simulate_path(CoefficientSchedule::iid(), eps, 200, 1e-4, 4));
        for (double y : {-1.0, 0.3}) {
            CHECK(expansion_remainder(iid, eps, G, y).H ==
                  doctest::Approx(200.0 * G.pdf(y) * iid.mean()).epsilon(1e-12));
        }
    }
    SUBCASE("U-sum definition") {
        for (int trial = 0; trial < 10; ++trial) {
            const auto p = simulate_path(CoefficientSchedule::lrd(0.7), eps, 50, Truncation{64, 0.0, true}, 70 + trial);
            const auto small = EmpiricalSample::from_path(p);
            const double y = 0.1 * trial - 0.4;
            double S = 0.0;
            for (Eigen::Index i = 0; i < 50; ++i) {
                const double U = p.values[i];  // U_{i,1} = X_i
                S += (p.values[i] <= y ? 1.0 : 0.0) - F.cdf(y) + F.pdf(y) * U;
            }
            CHECK(expansion_remainder(small, eps, F, y).S == doctest::Approx(S).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("increment statistic") {
    const auto F = build_marginal_oracle(CoefficientSchedule::lrd(0.7), InnovationModel::gaussian(), 20'000, 512, 3);
    const auto s = lrd_sample(31);
    CHECK(raw_increment(s, F, 0.3, 0.0) == 0.0);
    for (double x : {-0.5, 0.2, 0.7}) {
        const double d1 = 0.13, d2 = 0.31;
        CHECK(raw_increment(s, F, x, d1 + d2) ==
              doctest::Approx(raw_increment(s, F, x, d1) + raw_increment(s, F, x + d1, d2)).epsilon(1e-10).scale(1.0));
    }
    IncrementParams params;
    params.branch = IncrementBranch::gaussian;
    const auto g = increment_statistic(s, F, 0.2, 0.1, params);
    CHECK(g.normalized == doctest::Approx(g.raw / std::sqrt(512.0 * 0.1)));
    params.branch = IncrementBranch::rosenblatt;
    params.beta = 0.7;
    const auto r = increment_statistic(s, F, 0.2, 0.1, params);
    CHECK(r.normalized == doctest::Approx(r.raw / (std::pow(512.0, 0.6) * 0.1)));
}

TEST_CASE("branch selection") {
    CHECK(select_branch(0.85, 0.5 - 0.85) == IncrementBranch::gaussian);
    CHECK(select_branch(0.55, 0.5 - 0.55) == IncrementBranch::rosenblatt);
    // 4 beta - 3 = 1/2 - beta at beta = 0.7.
    CHECK_THROWS_AS(select_branch(0.7, -0.2), BoundaryRefusal);
    CHECK_THROWS_AS(select_branch(0.703, -0.203), BoundaryRefusal);
    CHECK(select_branch(0.71, -0.21) == IncrementBranch::gaussian);
    CHECK(increment_branch_from_string("auto") == IncrementBranch::automatic);
}
