#include "bahadur/errors.hpp"
#include "bahadur/experiments.hpp"
#include "bahadur/report_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace bahadur;

namespace {

ExperimentConfig small_config(const std::string& extra = "") {
    auto cfg = ExperimentConfig::parse(
        "[process]\nschedule = geometric\n[experiment]\nid = small\nn_grid = 2^6..2^9\nreplicates = 30\n"
        "oracle_replicates = 20000\n" +
        extra);
    cfg.validate();
    return cfg;
}

std::string dump(const ExperimentResult& r, const ExperimentConfig& cfg) { return report_json(r, cfg).dump(); }

}  // namespace

TEST_CASE("derive_seed") {
    CHECK(derive_seed(1, "x", 5) == derive_seed(1, "x", 5));
    CHECK(derive_seed(1, "x", 5) != derive_seed(1, "x", 6));
    CHECK(derive_seed(1, "x", 5) != derive_seed(2, "x", 5));
    CHECK(derive_seed(1, "x", 5) != derive_seed(1, "y", 5));
    std::vector<std::uint64_t> seeds(1'000'000);
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = derive_seed(42, "rate/n=1024", i);
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("reports do not depend on execution order or thread count") {
    for (const std::string kind : {"rate", "uniform-rate", "oscillation", "trimmed-clt"}) {
        auto cfg = small_config(kind == "trimmed-clt" ? "n = 256\n" : "");
        const auto base = run_experiment(kind, cfg);
        RunOptions shuffled;
        shuffled.shuffle_seed = 1234;
        RunOptions threaded;
        threaded.jobs = 3;
        threaded.shuffle_seed = 99;
        INFO(kind);
        CHECK(dump(run_experiment(kind, cfg, shuffled), cfg) == dump(base, cfg));
        const auto t = run_experiment(kind, cfg, threaded);
        CHECK(dump(t, cfg) == dump(base, cfg));
        CHECK(raw_csv(t.rows) == raw_csv(base.rows));
    }
}

TEST_CASE("reports rebuild exactly from the raw csv") {
    for (const std::string kind : {"rate", "trimmed-clt"}) {
        auto cfg = small_config("n = 256\n");
        const auto result = run_experiment(kind, cfg);
        auto rebuilt = result;
        rebuilt.rows = parse_raw_csv(raw_csv(result.rows));
        rebuilt.rate.reset();
        rebuilt.dist.reset();
        reaggregate(rebuilt);
        INFO(kind);
        CHECK(dump(rebuilt, cfg) == dump(result, cfg));
        CHECK(raw_csv(rebuilt.rows) == raw_csv(result.rows));
    }
}

TEST_CASE("rate report shape") {
    auto cfg = small_config();
    const auto r = run_rate_experiment(cfg);
    REQUIRE(r.rate);
    const auto& s = r.rate->primary();
    CHECK(s.statistic_name == "abs_remainder_srd");
    CHECK(s.per_n.size() == 4);
    CHECK(s.slope);
    CHECK(std::isfinite(*s.slope));
    CHECK(*s.theoretical_exponent == -0.75);
    CHECK(r.failures == 0);
    CHECK(r.rows.size() == 4 * 30 * 3);

    cfg.set("experiment.corrected=true");
    CHECK(run_rate_experiment(cfg).rate->primary().statistic_name == "abs_remainder_lrd");
}

TEST_CASE("single-n grid gives a report without slope") {
    auto cfg = small_config();
    cfg.set("experiment.n_grid=64");
    const auto r = run_rate_experiment(cfg);
    REQUIRE(r.rate);
    CHECK(r.rate->primary().per_n.size() == 1);
    CHECK_FALSE(r.rate->primary().slope);
    CHECK(report_json(r, cfg)["slope"].is_null());
}

TEST_CASE("replicate minimum") {
    auto cfg = small_config();
    cfg.set("experiment.replicates=29");
    CHECK_THROWS_AS(run_rate_experiment(cfg), ConfigError);
}

TEST_CASE("a noisy oracle raises the hard warning") {
    auto cfg = small_config("p = 0.75\n");
    cfg.set("experiment.oracle_replicates=50");
    const auto r = run_rate_experiment(cfg);
    CHECK(r.facts.at("noise_budget_ok") == 0.0);
    CHECK(std::any_of(r.warnings.begin(), r.warnings.end(),
                      [](const std::string& w) { return w.rfind("HARD:", 0) == 0; }));
}

TEST_CASE("config echo re-parses to an equal config") {
    auto cfg = small_config("p = 0.75\n");
    cfg.set("innovation.family=student_t");
    const auto j = report_json(run_rate_experiment(cfg), cfg);
    CHECK(config_from_echo(j["config"]) == cfg);
    CHECK(config_from_echo(nlohmann::json::parse(j.dump()).at("config")) == cfg);
}

TEST_CASE("trimmed clt on a symmetric process targets zero") {
    auto cfg = small_config("n = 1024\n");
    cfg.set("experiment.replicates=200");
    const auto r = run_trimmed_clt_experiment(cfg);
    CHECK(std::abs(r.facts.at("mu_target")) < 1e-12);
    const auto* d = r.dist->find("sqrt_n_trimmed_error");
    REQUIRE(d);
    CHECK(std::abs(d->mean) <= 4.0 * r.facts.at("mean_standard_error"));

    auto iid = ExperimentConfig::parse("[experiment]\nn = 1024\nreplicates = 200\n");
    iid.validate();
    const auto g = run_trimmed_clt_experiment(iid);
    CHECK(std::abs(g.facts.at("mu_target")) < 1e-12);
    CHECK(std::abs(g.dist->find("sqrt_n_trimmed_error")->mean) <= 4.0 * g.facts.at("mean_standard_error"));
}

TEST_CASE("oscillation with a zero window is identically zero") {
    auto cfg = ExperimentConfig::parse("[experiment]\nn_grid = 2^6..2^9\nreplicates = 30\nwindow_scale = 0\n");
    const auto r = run_oscillation_experiment(cfg);
    for (const auto& row : r.rows) CHECK(row.statistic_value == 0.0);
    CHECK_FALSE(r.rate->primary().slope);
}

TEST_CASE("dichotomy warns at a flat density derivative") {
    auto cfg = ExperimentConfig::parse(
        "[process]\nschedule = lrd\nbeta = 0.55\n[experiment]\nn = 1024\nreplicates = 30\nx_level = 0.5\n"
        "oracle_replicates = 20000\n");
    const auto r = run_dichotomy_experiment(cfg);
    CHECK(r.dist->find("increment_rosenblatt"));
    CHECK(std::any_of(r.warnings.begin(), r.warnings.end(),
                      [](const std::string& w) { return w.find("degenerate") != std::string::npos; }));
    cfg.set("process.beta=0.7");
    CHECK_THROWS_AS(run_dichotomy_experiment(cfg), BoundaryRefusal);
}

TEST_CASE("gmc experiment checks the moment order") {
    auto cfg = ExperimentConfig::parse(
        "[process]\nkind = iterated\n[innovation]\nfamily = student_t\nnu = 1.5\n[experiment]\nalpha = 2\n");
    CHECK_THROWS_AS(run_gmc_experiment(cfg), ConfigError);
    cfg.set("experiment.alpha=1");
    const auto r = run_gmc_experiment(cfg);
    CHECK(r.gmc);
    CHECK(r.rows.size() == 41);
}
