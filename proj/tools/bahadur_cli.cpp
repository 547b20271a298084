#include "bahadur/config.hpp"
#include "bahadur/empirical.hpp"
#include "bahadur/errors.hpp"
#include "bahadur/experiments.hpp"
#include "bahadur/linear_process.hpp"
#include "bahadur/rates.hpp"
#include "bahadur/remainder.hpp"
#include "bahadur/report_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace bahadur;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

const std::vector<std::string> kExperiments = {"rate", "uniform-rate", "oscillation", "dichotomy", "trimmed-clt", "gmc"};

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::string out_dir;
    bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "INI config file ([process] [innovation] [experiment] [output])")->required();
    sub->add_option("--set", c.sets, "Override one key, section.key=value (repeatable)");
    sub->add_option("--seed", c.seed, "Base seed (experiment.seed)");
    sub->add_option("--jobs", c.jobs, "Replicate threads; results do not depend on it");
    sub->add_option("--out-dir", c.out_dir, "Output directory (output.dir)");
    sub->add_flag("--quiet", c.quiet, "No progress on stderr");
}

ExperimentConfig load_config(const Common& c) {
    auto cfg = ExperimentConfig::load(c.config);
    for (const auto& s : c.sets) cfg.set(s);
    if (c.seed) cfg.set("experiment", "seed", std::to_string(*c.seed));
    if (!c.out_dir.empty()) cfg.set("output", "dir", c.out_dir);
    cfg.validate();
    return cfg;
}

std::string config_defaults_footer() {
    std::string out = "Config keys (defaults):\n";
    for (const auto& k : config_schema()) {
        out += "  " + k.section + "." + k.key + " = " + (k.default_value.empty() ? "\"\"" : k.default_value);
        if (!k.help.empty()) out += "  # " + k.help;
        out += "\n";
    }
    out += "\nExit codes: 0 success, 2 config error, 3 runtime failure.";
    return out;
}

int run_experiment_command(const std::string& kind, const Common& c) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    RunManifest manifest;
    manifest.config_hash = config_hash(cfg);
    manifest.started = utc_timestamp();
    const auto dir = cfg.output_dir();
    const std::string id = cfg.experiment_id().empty() ? kind : cfg.experiment_id();
    const auto manifest_path = dir / (id + ".manifest.json");

    RunOptions options;
    options.jobs = c.jobs.value_or(cfg.jobs());
    if (!c.quiet) options.progress = [](const std::string& m) { std::cerr << m << "\n"; };

    int code = kExitOk;
    try {
        const auto result = run_experiment(kind, cfg, options);
        if (cfg.write_csv()) {
            const auto csv = dir / (id + ".csv");
            write_raw_csv(result.rows, csv);
            manifest.files.push_back(csv.string());
        }
        const auto json_path = dir / (id + ".json");
        write_text(json_path, report_json(result, cfg).dump(2) + "\n");
        manifest.files.push_back(json_path.string());
        manifest.warnings = result.warnings;
        manifest.failures = result.failures;
        if (result.failures > 0) {
            manifest.partial = true;
            code = kExitRuntime;
        }
        if (!c.quiet) {
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
            if (result.rate) {
                const auto& s = result.rate->primary();
                if (s.slope) {
                    std::printf("%s slope %.4f (theory %.4f)\n", s.statistic_name.c_str(), *s.slope,
                                s.theoretical_exponent.value_or(std::nan("")));
                }
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BoundaryRefusal& e) {
        std::cerr << "config error: experiment.branch: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        manifest.partial = true;
        manifest.warnings.push_back(std::string("run aborted: ") + e.what());
        code = kExitRuntime;
    }
    manifest.finished = utc_timestamp();
    try {
        write_text(manifest_path, to_json(manifest).dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return kExitRuntime;
    }
    return code;
}

int run_simulate(const Common& c) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const std::int64_t n = cfg.n();
        const std::string id = cfg.experiment_id().empty() ? "simulate" : cfg.experiment_id();
        const auto seed = derive_seed(cfg.seed(), id, 0);
        EmpiricalSample sample = cfg.iterated()
                                     ? EmpiricalSample(simulate_chain(cfg.map_model(), n, seed))
                                     : EmpiricalSample::from_path(simulate_path(cfg.schedule(), cfg.innovation(), n,
                                                                                cfg.truncation_tolerance(), seed,
                                                                                cfg.max_lag()));
        const auto path = cfg.output_dir() / (id + "_sample.csv");
        write_sample_csv(sample, path);
        if (!c.quiet) std::cerr << "wrote " << path.string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

struct EvalArgs {
    std::string kind;
    double beta = std::nan("");
    double p = 0.5;
    double f = 1.0;
    std::int64_t n = 1024;
    double q = 2.0;
};

int run_eval(const EvalArgs& a) {
    try {
        double value;
        if (a.kind == "kiefer") {
            value = kiefer_limit(a.p, a.f);
        } else {
            RateParams params;
            params.beta = a.beta;
            params.q = a.q;
            value = rate_function(rate_kind_from_string(a.kind), a.n, params);
        }
        std::printf("%.15g\n", value);
    } catch (const InvalidParameter& e) {
        std::cerr << "config error: --kind: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    bahadur::use_mapped_large_buffers();
    CLI::App app{"Monte Carlo harness for Bahadur representations of dependent sequences", "bahadur"};
    app.require_subcommand(1);
    app.footer(config_defaults_footer());

    std::vector<Common> commons(kExperiments.size() + 1);
    std::vector<CLI::App*> subs;
    const std::vector<std::string> about = {
        "Pointwise remainder rate over the n-grid",
        "Uniform remainder rate over [p0, p1]",
        "Local oscillation modulus of F_n - F and of the martingale part",
        "Gaussian/Rosenblatt increment dichotomy at a single n",
        "CLT for the trimmed or Winsorized mean",
        "Geometric-moment contraction of an iterated map",
    };
    for (std::size_t i = 0; i < kExperiments.size(); ++i) {
        auto* sub = app.add_subcommand(kExperiments[i], about[i]);
        add_common(sub, commons[i]);
        subs.push_back(sub);
    }
    auto* simulate = app.add_subcommand("simulate", "Write one simulated path as a single-column CSV");
    add_common(simulate, commons.back());

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval-rate-fn", "Print one rate function or constant");
    std::vector<std::string> kinds = {"kiefer"};
    for (auto k : {RateKind::ell_q, RateKind::iota_q, RateKind::psi, RateKind::sigma_n1_asym, RateKind::sigma_n1_exact,
                   RateKind::A_beta, RateKind::b_thm3, RateKind::c_beta, RateKind::lrd_exponent,
                   RateKind::kiefer_scale}) {
        kinds.emplace_back(to_string(k));
    }
    eval_cmd->add_option("--kind", eval.kind, "Rate function")->required()->check(CLI::IsMember(kinds));
    eval_cmd->add_option("--beta", eval.beta, "Memory exponent in (1/2, 1)");
    eval_cmd->add_option("--p", eval.p, "Quantile level (kiefer)")->capture_default_str();
    eval_cmd->add_option("--f", eval.f, "Density at the quantile (kiefer)")->capture_default_str();
    eval_cmd->add_option("--n", eval.n, "Sample size")->capture_default_str();
    eval_cmd->add_option("--q", eval.q, "Moment order")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    for (std::size_t i = 0; i < kExperiments.size(); ++i) {
        if (subs[i]->parsed()) return run_experiment_command(kExperiments[i], commons[i]);
    }
    if (simulate->parsed()) return run_simulate(commons.back());
    return run_eval(eval);
}
