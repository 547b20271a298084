#include "bahadur/experiments.hpp"

#include "bahadur/empirical.hpp"
#include "bahadur/errors.hpp"
#include "bahadur/linear_process.hpp"
#include "bahadur/rates.hpp"
#include "bahadur/remainder.hpp"
#include "bahadur/special.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace bahadur {

std::uint64_t derive_seed(std::uint64_t base, std::string_view experiment_id, std::uint64_t replicate) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : experiment_id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    const std::uint64_t stream = mix64(base ^ mix64(h));
    return mix64(stream + replicate);
}

const Series* RateReport::find(std::string_view statistic) const {
    for (const auto& s : series) {
        if (s.statistic_name == statistic) return &s;
    }
    return nullptr;
}

const DistReport* DistributionReport::find(std::string_view statistic) const {
    for (const auto& s : series) {
        if (s.statistic_name == statistic) return &s.dist;
    }
    return nullptr;
}

RateReport aggregate_rate(const std::vector<RawRow>& rows, const RateSpec& spec) {
    RateReport report;
    report.experiment_id = spec.experiment_id;
    for (const auto& name : spec.statistics) {
        Series series;
        series.statistic_name = name;
        std::map<std::int64_t, std::vector<std::pair<std::int64_t, double>>> by_n;
        for (const auto& r : rows) {
            if (r.statistic_name == name) by_n[r.n].emplace_back(r.replicate, r.statistic_value);
        }
        Eigen::VectorXd ns(static_cast<Eigen::Index>(by_n.size()));
        Eigen::VectorXd medians(ns.size());
        std::vector<Eigen::VectorXd> samples;
        Eigen::Index i = 0;
        for (auto& [n, vals] : by_n) {
            std::sort(vals.begin(), vals.end());
            Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
            for (std::size_t k = 0; k < vals.size(); ++k) v[static_cast<Eigen::Index>(k)] = vals[k].second;
            series.per_n.push_back({n, summarize(v)});
            ns[i] = static_cast<double>(n);
            medians[i] = series.per_n.back().summary.median;
            samples.push_back(std::move(v));
            ++i;
        }
        if (auto it = spec.theoretical_exponents.find(name); it != spec.theoretical_exponents.end()) {
            series.theoretical_exponent = it->second;
        }
        if (ns.size() >= 4 && (medians.array() > 0.0).all()) {
            const auto fit = fit_loglog_slope(ns, medians);
            series.slope = fit.slope;
            series.intercept = fit.intercept;
            series.slope_stderr = bootstrap_slope_stderr(
                ns, samples, spec.bootstrap_resamples,
                derive_seed(spec.base_seed, spec.experiment_id + "/bootstrap/" + name, 0));
        }
        report.series.push_back(std::move(series));
    }
    return report;
}

DistributionReport aggregate_distribution(const std::vector<RawRow>& rows, const std::string& experiment_id,
                                          const std::vector<std::string>& statistics) {
    DistributionReport report;
    report.experiment_id = experiment_id;
    for (const auto& name : statistics) {
        std::vector<std::pair<std::int64_t, double>> vals;
        for (const auto& r : rows) {
            if (r.statistic_name == name) vals.emplace_back(r.replicate, r.statistic_value);
        }
        if (vals.empty()) continue;
        std::sort(vals.begin(), vals.end());
        Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
        for (std::size_t k = 0; k < vals.size(); ++k) v[static_cast<Eigen::Index>(k)] = vals[k].second;
        report.series.push_back({name, summarize_distribution(v)});
    }
    return report;
}

void reaggregate(ExperimentResult& result) {
    if (result.rate_spec) result.rate = aggregate_rate(result.rows, *result.rate_spec);
    if (!result.dist_statistics.empty()) {
        result.dist = aggregate_distribution(result.rows, result.experiment_id, result.dist_statistics);
    }
}

namespace {

// ---------------------------------------------------------------------------
// Replicate execution

struct Batch {
    std::vector<RawRow> rows;  // in replicate order
    std::int64_t failures = 0;
    std::string first_error;
};

Batch run_replicates(std::int64_t count, const RunOptions& options,
                     const std::function<std::vector<RawRow>(std::int64_t)>& fn) {
    std::vector<std::int64_t> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    if (options.shuffle_seed) {
        RandomStream stream(*options.shuffle_seed);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[stream.next_u64() % i]);
    }
    std::vector<std::vector<RawRow>> slots(order.size());
    std::vector<std::string> errors(order.size());
    std::vector<char> failed(order.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= order.size()) return;
            const auto i = static_cast<std::size_t>(order[k]);
            try {
                slots[i] = fn(static_cast<std::int64_t>(i));
            } catch (const std::exception& e) {
                failed[i] = 1;
                errors[i] = e.what();
            }
        }
    };
    const int jobs = std::max(1, options.jobs);
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Batch batch;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (failed[i]) {
            if (batch.failures++ == 0) batch.first_error = "replicate " + std::to_string(i) + ": " + errors[i];
            continue;
        }
        for (auto& r : slots[i]) batch.rows.push_back(std::move(r));
    }
    return batch;
}

void absorb(ExperimentResult& result, Batch&& batch, std::int64_t attempted) {
    result.attempted += attempted;
    result.failures += batch.failures;
    if (batch.failures > 0) {
        result.warnings.push_back(std::to_string(batch.failures) + " replicate(s) failed; first: " + batch.first_error);
    }
    for (auto& r : batch.rows) result.rows.push_back(std::move(r));
}

void say(const RunOptions& options, const std::string& message) {
    if (options.progress) options.progress(message);
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

// ---------------------------------------------------------------------------
// Process and oracle

struct Process {
    bool iterated = false;
    std::optional<IteratedMapModel> map;
    CoefficientSchedule schedule = CoefficientSchedule::iid();
    InnovationModel eps;
    Truncation truncation;
    std::shared_ptr<const MarginalDistribution> oracle;
    std::string kind;

    bool long_memory() const { return !iterated && schedule.long_memory(); }
};

Process make_process(const ExperimentConfig& cfg, std::int64_t n_max, const std::string& id, ExperimentResult& result,
                     const RunOptions& options, bool need_oracle = true) {
    Process proc{false, std::nullopt, CoefficientSchedule::iid(), cfg.innovation(), {}, nullptr, ""};
    const std::uint64_t oracle_seed = derive_seed(cfg.seed(), id + "/oracle", 0);
    if (cfg.iterated()) {
        proc.iterated = true;
        proc.map = cfg.map_model();
        proc.kind = "iterated:" + std::string(to_string(proc.map->kind()));
        if (need_oracle) {
            say(options, "building chain oracle (" + std::to_string(cfg.oracle_replicates()) + " states)");
            proc.oracle = std::make_shared<MarginalOracle>(build_chain_oracle(*proc.map, cfg.oracle_replicates(), oracle_seed));
        }
    } else {
        proc.schedule = cfg.schedule();
        proc.kind = "linear:" + std::string(to_string(proc.schedule.kind()));
        proc.truncation = choose_truncation(proc.schedule, proc.eps, n_max, cfg.truncation_tolerance(), cfg.max_lag());
        proc.truncation.far_past = cfg.far_past();
        if (proc.truncation.far_past == FarPast::gaussian) {
            result.facts["far_past_variance"] =
                proc.eps.variance() * far_past_covariance(proc.schedule, proc.truncation.lag, 1.0, 1.0);
        }
        result.facts["truncation_lag"] = static_cast<double>(proc.truncation.lag);
        result.facts["truncation_achieved"] = proc.truncation.achieved;
        if (!proc.truncation.met) {
            result.warnings.push_back("truncation tolerance " + fmt(cfg.truncation_tolerance()) +
                                      " not met at max_lag " + std::to_string(proc.truncation.lag) +
                                      "; achieved " + fmt(proc.truncation.achieved));
        }
        if (need_oracle) {
            if (proc.schedule.kind() == ScheduleKind::iid) {
                proc.oracle = std::make_shared<InnovationMarginal>(proc.eps);
            } else {
                say(options, "building marginal oracle (M = " + std::to_string(proc.truncation.lag) + ", R = " +
                                 std::to_string(cfg.oracle_replicates()) + ")");
                proc.oracle = std::make_shared<MarginalOracle>(build_marginal_oracle(
                    proc.schedule, proc.eps, cfg.oracle_replicates(), proc.truncation.lag, oracle_seed,
                    proc.truncation.far_past));
            }
        }
    }
    if (proc.oracle) result.facts["oracle_precision"] = proc.oracle->precision();
    return proc;
}

// Draws one sample of length n; `sim` is the linear simulator for this n.
EmpiricalSample draw_sample(const Process& proc, const LinearProcessSimulator* sim, std::int64_t n,
                            std::uint64_t seed) {
    if (proc.iterated) return EmpiricalSample(simulate_chain(*proc.map, n, seed));
    return EmpiricalSample::from_path(sim->simulate(seed));
}

std::unique_ptr<LinearProcessSimulator> make_simulator(const Process& proc, std::int64_t n) {
    if (proc.iterated) return nullptr;
    return std::make_unique<LinearProcessSimulator>(proc.schedule, proc.eps, n, proc.truncation);
}

std::string default_id(const ExperimentConfig& cfg, const std::string& kind) {
    return cfg.experiment_id().empty() ? kind : cfg.experiment_id();
}

double beta_of(const Process& proc, const ExperimentConfig& cfg) {
    return proc.long_memory() ? proc.schedule.beta() : cfg.get_double("process", "beta");
}

// Pointwise or uniform remainder exponents; without logarithmic factors.
std::pair<double, double> remainder_exponents(const Process& proc) {
    if (!proc.long_memory()) return {-0.75, -0.75};
    const double beta = proc.schedule.beta();
    const double corrected = lrd_exponent(beta);
    return {std::max(1.0 - 2.0 * beta, corrected), corrected};
}

void check_noise_budget(ExperimentResult& result, double error_bar, const RateReport& report) {
    const auto& last = report.primary().per_n;
    if (last.empty()) return;
    const double median = last.back().summary.median;
    result.facts["oracle_error_bar"] = error_bar;
    const bool ok = error_bar <= 0.1 * median;
    result.facts["noise_budget_ok"] = ok ? 1.0 : 0.0;
    if (!ok) {
        result.warnings.push_back("HARD: oracle noise budget exceeded: error bar " + fmt(error_bar) +
                                  " > 0.1 x median statistic " + fmt(median) + " at n = " +
                                  std::to_string(last.back().n));
    }
}

RawRow base_row(const std::string& id, const Process& proc, std::int64_t n, std::int64_t replicate,
                std::uint64_t seed) {
    RawRow row;
    row.experiment_id = id;
    row.process_kind = proc.kind;
    row.n = n;
    row.replicate = replicate;
    row.seed = seed;
    return row;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentResult run_rate_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    ExperimentResult result;
    result.kind = "rate";
    result.experiment_id = default_id(cfg, "rate");
    const std::string& id = result.experiment_id;
    const auto grid = cfg.n_grid();
    const Process proc = make_process(cfg, grid.back(), id, result, options);
    const QuantilePoint q = quantile_point(*proc.oracle, cfg.p());
    result.facts["xi_p"] = q.xi;
    result.facts["f_xi"] = q.f;
    result.facts["fprime_xi"] = q.fprime;
    result.facts["kiefer_limit"] = kiefer_limit(q.p, q.f);

    for (const auto n : grid) {
        say(options, "rate: n = " + std::to_string(n));
        const auto sim = make_simulator(proc, n);
        const std::string seed_id = id + "/n=" + std::to_string(n);
        const double nd = static_cast<double>(n);
        const double kiefer_norm = std::pow(nd, 0.75) * std::pow(std::log(std::log(nd)), -0.75);
        auto batch = run_replicates(cfg.replicates(), options, [&](std::int64_t r) {
            const auto seed = derive_seed(cfg.seed(), seed_id, static_cast<std::uint64_t>(r));
            const auto sample = draw_sample(proc, sim.get(), n, seed);
            const auto d = remainder(sample, q, cfg.corrected());
            RawRow row = base_row(id, proc, n, r, seed);
            row.p = q.p;
            row.xi_np = d.xi_np;
            row.linear_term = d.linear_term;
            row.correction_term = d.correction_term;
            row.remainder_srd = d.remainder_srd;
            row.remainder_lrd = d.remainder_lrd;
            std::vector<RawRow> out(3, row);
            out[0].statistic_name = "abs_remainder_srd";
            out[0].statistic_value = std::abs(d.remainder_srd);
            out[1].statistic_name = "abs_remainder_lrd";
            out[1].statistic_value = std::abs(d.remainder_lrd);
            out[2].statistic_name = "kiefer_normalized_srd";
            out[2].statistic_value = kiefer_norm * std::abs(d.remainder_srd);
            return out;
        });
        absorb(result, std::move(batch), cfg.replicates());
    }

    const auto [srd_exp, lrd_exp] = remainder_exponents(proc);
    RateSpec spec;
    spec.experiment_id = id;
    spec.base_seed = cfg.seed();
    spec.statistics = cfg.corrected()
                          ? std::vector<std::string>{"abs_remainder_lrd", "abs_remainder_srd", "kiefer_normalized_srd"}
                          : std::vector<std::string>{"abs_remainder_srd", "abs_remainder_lrd", "kiefer_normalized_srd"};
    spec.theoretical_exponents = {
        {"abs_remainder_srd", srd_exp}, {"abs_remainder_lrd", lrd_exp}, {"kiefer_normalized_srd", 0.0}};
    result.rate_spec = spec;
    result.rate = aggregate_rate(result.rows, spec);
    check_noise_budget(result, proc.oracle->standard_error(q.xi) / q.f, *result.rate);
    if (grid.size() < 4) result.warnings.push_back("fewer than 4 grid points: no slope fitted");
    return result;
}

ExperimentResult run_uniform_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    ExperimentResult result;
    result.kind = "uniform-rate";
    result.experiment_id = default_id(cfg, "uniform-rate");
    const std::string& id = result.experiment_id;
    const auto grid = cfg.n_grid();
    const Process proc = make_process(cfg, grid.back(), id, result, options);
    const double p0 = cfg.p0(), p1 = cfg.p1();

    // Thousands of quantile levels per n: interpolate a tabulated oracle.
    std::shared_ptr<const MarginalDistribution> F = proc.oracle;
    if (proc.oracle->precision() > 0.0) {
        const double lo = proc.oracle->quantile(std::max(p0 - 0.02, 0.5 * p0));
        const double hi = proc.oracle->quantile(std::min(p1 + 0.02, 0.5 * (1.0 + p1)));
        F = std::make_shared<MarginalTable>(MarginalTable::tabulate(proc.oracle, lo, hi, 4001));
    }
    double max_bar = 0.0;
    const std::string stat = cfg.corrected() ? "uniform_remainder_lrd" : "uniform_remainder_srd";

    for (const auto n : grid) {
        say(options, "uniform-rate: n = " + std::to_string(n));
        const auto points = uniform_grid(*F, n, p0, p1, cfg.grid_points());
        for (const auto& g : points) max_bar = std::max(max_bar, proc.oracle->standard_error(g.q.xi) / g.q.f);
        const auto sim = make_simulator(proc, n);
        const std::string seed_id = id + "/n=" + std::to_string(n);
        auto batch = run_replicates(cfg.replicates(), options, [&](std::int64_t r) {
            const auto seed = derive_seed(cfg.seed(), seed_id, static_cast<std::uint64_t>(r));
            const auto sample = draw_sample(proc, sim.get(), n, seed);
            const auto u = uniform_remainder(sample, points, cfg.corrected());
            RawRow row = base_row(id, proc, n, r, seed);
            row.p = u.argmax_p;
            row.statistic_name = stat;
            row.statistic_value = u.sup;
            return std::vector<RawRow>{row};
        });
        absorb(result, std::move(batch), cfg.replicates());
    }
    const auto [srd_exp, lrd_exp] = remainder_exponents(proc);
    RateSpec spec{id, cfg.seed(), {stat}, {{stat, cfg.corrected() ? lrd_exp : srd_exp}}};
    result.rate_spec = spec;
    result.rate = aggregate_rate(result.rows, spec);
    check_noise_budget(result, max_bar, *result.rate);
    if (grid.size() < 4) result.warnings.push_back("fewer than 4 grid points: no slope fitted");
    return result;
}

ExperimentResult run_oscillation_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    ExperimentResult result;
    result.kind = "oscillation";
    result.experiment_id = default_id(cfg, "oscillation");
    const std::string& id = result.experiment_id;
    const auto grid = cfg.n_grid();
    const Process proc = make_process(cfg, grid.back(), id, result, options);
    const auto& F = *proc.oracle;
    const double x = F.quantile(cfg.center_level());
    result.facts["x"] = x;
    const bool smooth_equals_F = !proc.iterated && proc.schedule.kind() == ScheduleKind::iid;
    const bool have_martingale = !proc.iterated;
    const int points = std::max(cfg.grid_points(), 2);

    for (const auto n : grid) {
        say(options, "oscillation: n = " + std::to_string(n));
        const double b = cfg.window_scale() * std::pow(static_cast<double>(n), cfg.window_exponent());
        const auto sim = make_simulator(proc, n);
        const std::string seed_id = id + "/n=" + std::to_string(n);
        auto batch = run_replicates(cfg.replicates(), options, [&](std::int64_t r) {
            const auto seed = derive_seed(cfg.seed(), seed_id, static_cast<std::uint64_t>(r));
            const auto sample = draw_sample(proc, sim.get(), n, seed);
            RawRow row = base_row(id, proc, n, r, seed);
            row.p = cfg.center_level();
            std::vector<RawRow> out;
            const double diff =
                step_oscillation_modulus(sample, [&F](double t) { return F.cdf(t); }, x, b, points);
            out.push_back(row);
            out.back().statistic_name = "modulus_difference";
            out.back().statistic_value = diff;
            if (have_martingale) {
                // For i.i.d. data F_n* = F, so both moduli coincide.
                const double mart =
                    smooth_equals_F ? diff
                                    : step_oscillation_modulus(
                                          sample, [&](double t) { return conditional_cdf(sample, proc.eps, t); }, x,
                                          b, points);
                out.push_back(row);
                out.back().statistic_name = "modulus_martingale";
                out.back().statistic_value = mart;
            }
            return out;
        });
        absorb(result, std::move(batch), cfg.replicates());
    }
    const double exponent = (cfg.window_exponent() - 1.0) / 2.0;
    RateSpec spec{id, cfg.seed(), {"modulus_difference"}, {{"modulus_difference", exponent}}};
    if (have_martingale) {
        spec.statistics.push_back("modulus_martingale");
        spec.theoretical_exponents["modulus_martingale"] = exponent;
    }
    result.rate_spec = spec;
    result.rate = aggregate_rate(result.rows, spec);
    check_noise_budget(result, F.standard_error(x), *result.rate);
    if (grid.size() < 4) result.warnings.push_back("fewer than 4 grid points: no slope fitted");
    return result;
}

ExperimentResult run_dichotomy_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    ExperimentResult result;
    result.kind = "dichotomy";
    result.experiment_id = default_id(cfg, "dichotomy");
    const std::string& id = result.experiment_id;
    if (cfg.iterated()) throw ConfigError("process.kind", "dichotomy needs a linear process");
    const std::int64_t n = cfg.n();
    const Process proc = make_process(cfg, n, id, result, options);
    const auto& F = *proc.oracle;
    const double beta = beta_of(proc, cfg);
    const double gamma = cfg.gamma();

    IncrementParams params;
    params.branch = increment_branch_from_string(cfg.branch());
    params.beta = beta;
    params.L = proc.long_memory() ? proc.schedule.slowly_varying() : SlowlyVarying::constant();
    params.gamma = gamma;
    if (params.branch == IncrementBranch::automatic) params.branch = select_branch(beta, gamma);
    if (params.branch == IncrementBranch::rosenblatt && !proc.long_memory()) {
        throw ConfigError("experiment.branch", "the rosenblatt normalization needs an lrd schedule");
    }

    const double x = F.quantile(cfg.x_level());
    const double delta = std::pow(static_cast<double>(n), gamma);
    const double nd = static_cast<double>(n);
    result.facts["x"] = x;
    result.facts["delta"] = delta;
    result.facts["f_x"] = F.pdf(x);
    result.facts["fprime_x"] = F.pdf_deriv(x);
    result.facts["beta"] = beta;
    result.facts["gamma"] = gamma;
    const double l = params.L(nd);
    result.facts["sigma_n2"] = std::pow(nd, 2.0 - 2.0 * beta) * l * l;
    if (params.branch == IncrementBranch::rosenblatt && std::abs(F.pdf_deriv(x)) < 10.0 * F.precision() + 1e-12) {
        result.warnings.push_back("f'(x) is ~0 at x = " + fmt(x) + ": the rosenblatt limit is degenerate here");
    }

    const std::string stat = "increment_" + std::string(to_string(params.branch));
    say(options, "dichotomy: n = " + std::to_string(n) + ", branch " + std::string(to_string(params.branch)));
    const auto sim = make_simulator(proc, n);
    const std::string seed_id = id + "/n=" + std::to_string(n);
    auto batch = run_replicates(cfg.replicates(), options, [&](std::int64_t r) {
        const auto seed = derive_seed(cfg.seed(), seed_id, static_cast<std::uint64_t>(r));
        const auto sample = draw_sample(proc, sim.get(), n, seed);
        const auto inc = increment_statistic(sample, F, x, delta, params);
        RawRow row = base_row(id, proc, n, r, seed);
        row.p = cfg.x_level();
        std::vector<RawRow> out(2, row);
        out[0].statistic_name = stat;
        out[0].statistic_value = inc.normalized;
        out[1].statistic_name = "increment_raw";
        out[1].statistic_value = inc.raw;
        return out;
    });
    absorb(result, std::move(batch), cfg.replicates());
    result.dist_statistics = {stat, "increment_raw"};
    result.dist = aggregate_distribution(result.rows, id, result.dist_statistics);
    if (cfg.replicates() < 100) result.warnings.push_back("fewer than 100 replicates behind the moment diagnostics");
    return result;
}

ExperimentResult run_trimmed_clt_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    ExperimentResult result;
    result.kind = "trimmed-clt";
    result.experiment_id = default_id(cfg, "trimmed-clt");
    const std::string& id = result.experiment_id;
    const std::int64_t n = cfg.n();
    const Process proc = make_process(cfg, n, id, result, options);
    const auto& F = *proc.oracle;
    const double p0 = cfg.p0(), p1 = cfg.p1();
    const std::string variant = cfg.winsor();

    // int_{p0}^{p1} xi_u du by 64-node Gauss-Legendre on u.
    static const special::GaussRule rule = special::gauss_legendre(64);
    double integral = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
        const double u = 0.5 * (p0 + p1) + 0.5 * (p1 - p0) * rule.nodes[i];
        integral += rule.weights[i] * F.quantile(u);
    }
    integral *= 0.5 * (p1 - p0);
    const double mu = variant == "none" ? integral / (p1 - p0)
                                        : p0 * F.quantile(p0) + (1.0 - p1) * F.quantile(p1) + integral;
    result.facts["mu_target"] = mu;

    const std::string stat = variant == "none" ? "sqrt_n_trimmed_error" : "sqrt_n_winsorized_error";
    say(options, "trimmed-clt: n = " + std::to_string(n));
    const auto sim = make_simulator(proc, n);
    const std::string seed_id = id + "/n=" + std::to_string(n);
    const double root_n = std::sqrt(static_cast<double>(n));
    auto batch = run_replicates(cfg.replicates(), options, [&](std::int64_t r) {
        const auto seed = derive_seed(cfg.seed(), seed_id, static_cast<std::uint64_t>(r));
        const auto sample = draw_sample(proc, sim.get(), n, seed);
        double t;
        if (variant == "none") {
            t = trimmed_mean(sample, p0, p1);
        } else {
            t = winsorized_mean(sample, p0, p1,
                                variant == "display" ? WinsorVariant::display : WinsorVariant::shifted);
        }
        RawRow row = base_row(id, proc, n, r, seed);
        row.statistic_name = stat;
        row.statistic_value = root_n * (t - mu);
        return std::vector<RawRow>{row};
    });
    absorb(result, std::move(batch), cfg.replicates());
    result.dist_statistics = {stat};
    result.dist = aggregate_distribution(result.rows, id, result.dist_statistics);
    if (const auto* d = result.dist->find(stat)) {
        result.facts["mean_standard_error"] = std::sqrt(d->variance / static_cast<double>(d->count));
    }
    return result;
}

ExperimentResult run_gmc_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    ExperimentResult result;
    result.kind = "gmc";
    result.experiment_id = default_id(cfg, "gmc");
    if (!cfg.iterated()) throw ConfigError("process.kind", "gmc needs an iterated process");
    const auto model = cfg.map_model();
    if (cfg.alpha() > model.innovation().alpha_moment()) {
        throw ConfigError("experiment.alpha", "exceeds the innovation moment order");
    }
    if (cfg.replicates() < 100) throw ConfigError("experiment.replicates", "gmc needs at least 100 replicates");
    say(options, "gmc: " + model.describe());
    const auto seed = derive_seed(cfg.seed(), result.experiment_id, 0);
    result.gmc = estimate_gmc(model, cfg.alpha(), cfg.lags(), cfg.replicates(), seed);
    result.attempted = cfg.replicates();
    const std::string kind = "iterated:" + std::string(to_string(model.kind()));
    for (Eigen::Index k = 0; k < result.gmc->mean_distance.size(); ++k) {
        RawRow row;
        row.experiment_id = result.experiment_id;
        row.process_kind = kind;
        row.n = k;
        row.replicate = 0;
        row.seed = seed;
        row.statistic_name = "mean_distance";
        row.statistic_value = result.gmc->mean_distance[k];
        result.rows.push_back(row);
    }
    result.facts["r_hat"] = result.gmc->r_hat;
    result.facts["slope"] = result.gmc->slope;
    result.facts["usable_lags"] = static_cast<double>(result.gmc->usable_lags);
    if (result.gmc->degenerate) {
        result.warnings.push_back("degenerate decay: distances reach numeric zero after " +
                                  std::to_string(result.gmc->usable_lags) + " lag(s)");
    }
    return result;
}

void use_mapped_large_buffers() {
#if defined(__GLIBC__)
    // A fixed threshold also stops glibc from raising it after each free.
    mallopt(M_MMAP_THRESHOLD, 1 << 20);
#endif
}

ExperimentResult run_experiment(const std::string& kind, const ExperimentConfig& config, const RunOptions& options) {
    if (kind == "rate") return run_rate_experiment(config, options);
    if (kind == "uniform-rate") return run_uniform_experiment(config, options);
    if (kind == "oscillation") return run_oscillation_experiment(config, options);
    if (kind == "dichotomy") return run_dichotomy_experiment(config, options);
    if (kind == "trimmed-clt") return run_trimmed_clt_experiment(config, options);
    if (kind == "gmc") return run_gmc_experiment(config, options);
    throw InvalidParameter("unknown experiment '" + kind + "'");
}

}  // namespace bahadur
