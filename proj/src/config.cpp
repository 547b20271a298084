#include "bahadur/config.hpp"

#include "bahadur/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bahadur {

const std::vector<ConfigKey>& config_schema() {
    static const std::vector<ConfigKey> schema = {
        {"process", "kind", "linear", "linear | iterated"},
        {"process", "schedule", "iid", "iid | geometric | polynomial_srd | lrd (linear processes)"},
        {"process", "rho", "0.5", "geometric coefficient a_i = rho^i"},
        {"process", "r", "2", "polynomial_srd decay a_i = i^-r, r > 1"},
        {"process", "beta", "0.75", "lrd decay a_i = i^-beta L(i), 1/2 < beta < 1"},
        {"process", "L", "const", "slowly varying factor: const | log_power"},
        {"process", "L_value", "1", "constant c, or gamma in (log(e + i))^gamma"},
        {"process", "map", "ar1", "ar1 | arch1 | tar (iterated processes)"},
        {"process", "a", "0.5", "ar1 coefficient"},
        {"process", "c0", "1", "arch1 intercept"},
        {"process", "c1", "0.3", "arch1 slope"},
        {"process", "phi_plus", "0.5", "tar coefficient for x > 0"},
        {"process", "phi_minus", "0.5", "tar coefficient for x < 0"},
        {"process", "burn_in", "1000", "iterations discarded before a chain is used"},
        {"process", "truncation_tolerance", "1e-4", "filter truncation tolerance"},
        {"process", "max_lag", "2097152", "hard cap on the truncation lag"},
        {"process", "far_past", "none", "lags beyond the truncation: none (dropped) | gaussian (added back, lrd only)"},
        {"innovation", "family", "gaussian", "gaussian | uniform | uniform_smoothwrap | student_t | logistic"},
        {"innovation", "scale", "1", "scale > 0"},
        {"innovation", "nu", "3", "student_t degrees of freedom"},
        {"experiment", "id", "", "experiment id (default: the subcommand name)"},
        {"experiment", "n_grid", "2^10..2^17", "sample sizes: list or 2^a..2^b"},
        {"experiment", "n", "65536", "sample size for single-n experiments"},
        {"experiment", "replicates", "200", "replicates per n, >= 30"},
        {"experiment", "p", "0.5", "quantile level"},
        {"experiment", "p0", "0.25", "lower level of the uniform / trimming range"},
        {"experiment", "p1", "0.75", "upper level of the uniform / trimming range"},
        {"experiment", "corrected", "false", "primary statistic uses the corrected remainder"},
        {"experiment", "grid_points", "200", "uniform-remainder grid size (at least ceil(sqrt n) is used)"},
        {"experiment", "oracle_replicates", "200000", "draws behind the marginal oracle"},
        {"experiment", "seed", "1", "base seed"},
        {"experiment", "jobs", "1", "worker threads"},
        {"experiment", "window_scale", "1", "oscillation window b_n = scale * n^exponent"},
        {"experiment", "window_exponent", "-0.5", "oscillation window exponent"},
        {"experiment", "center_level", "0.5", "oscillation center x = xi_level"},
        {"experiment", "x_level", "0.75", "dichotomy point x = xi_level"},
        {"experiment", "gamma", "", "dichotomy window delta_n = n^gamma (default 1/2 - beta)"},
        {"experiment", "branch", "auto", "dichotomy normalization: auto | gaussian | rosenblatt"},
        {"experiment", "winsor", "none", "trimmed-clt statistic: none (trimmed) | display | shifted"},
        {"experiment", "alpha", "2", "gmc moment order"},
        {"experiment", "lags", "40", "gmc lags"},
        {"output", "dir", "out", "output directory"},
        {"output", "csv", "true", "write raw replicate CSV"},
    };
    return schema;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool known(const std::string& section, const std::string& key) {
    for (const auto& k : config_schema()) {
        if (k.section == section && k.key == key) return true;
    }
    return false;
}

bool known_section(const std::string& section) {
    return section == "process" || section == "innovation" || section == "experiment" || section == "output";
}

double to_double(const std::string& where, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where, "expected a finite number, got '" + text + "'");
    }
}

std::int64_t to_int(const std::string& where, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where, "expected an integer, got '" + text + "'");
    }
}

}  // namespace

std::vector<std::int64_t> parse_n_grid(const std::string& text) {
    std::vector<std::int64_t> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        auto power = [&](std::string part) {
            part = trim(part);
            if (part.rfind("2^", 0) != 0) throw ConfigError("experiment.n_grid", "range form is 2^a..2^b");
            return to_int("experiment.n_grid", part.substr(2));
        };
        const auto a = power(text.substr(0, dots));
        const auto b = power(text.substr(dots + 2));
        if (a < 1 || b > 40 || a > b) throw ConfigError("experiment.n_grid", "powers must satisfy 1 <= a <= b <= 40");
        for (auto e = a; e <= b; ++e) out.push_back(std::int64_t{1} << e);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int("experiment.n_grid", trim(item)));
    return out;
}

ExperimentConfig::ExperimentConfig() {
    for (const auto& k : config_schema()) values_[k.section + "." + k.key] = k.default_value;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::map<std::string, int> seen;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const std::string where = origin + " line " + std::to_string(lineno);
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section)) throw ConfigError(where, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where, "expected key = value");
        if (section.empty()) throw ConfigError(where, "key outside of a section");
        const std::string key = trim(line.substr(0, eq));
        const std::string field = section + "." + key;
        if (!known(section, key)) throw ConfigError(field, "unknown key (" + where + ")");
        if (seen.count(field)) {
            throw ConfigError(field, "duplicate key (" + where + ", first at line " + std::to_string(seen[field]) + ")");
        }
        seen[field] = lineno;
        cfg.values_[field] = trim(line.substr(eq + 1));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void ExperimentConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    if (!known(section, key)) throw ConfigError(section + "." + key, "unknown key");
    values_[section + "." + key] = trim(value);
}

void ExperimentConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    const std::string lhs = trim(assignment.substr(0, eq));
    const auto dot = lhs.find('.');
    if (eq == std::string::npos || dot == std::string::npos) {
        throw ConfigError(lhs, "override must look like section.key=value");
    }
    set(lhs.substr(0, dot), lhs.substr(dot + 1), assignment.substr(eq + 1));
}

const std::string& ExperimentConfig::raw(const std::string& section, const std::string& key) const {
    const auto it = values_.find(section + "." + key);
    if (it == values_.end()) throw ConfigError(section + "." + key, "unknown key");
    return it->second;
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key) const {
    return to_double(section + "." + key, raw(section, key));
}

std::int64_t ExperimentConfig::get_int(const std::string& section, const std::string& key) const {
    return to_int(section + "." + key, raw(section, key));
}

bool ExperimentConfig::get_bool(const std::string& section, const std::string& key) const {
    const auto& v = raw(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(section + "." + key, "expected true or false, got '" + v + "'");
}

std::string ExperimentConfig::to_ini() const {
    std::ostringstream out;
    std::string section;
    for (const auto& k : config_schema()) {
        if (k.section != section) {
            if (!section.empty()) out << "\n";
            section = k.section;
            out << "[" << section << "]\n";
        }
        out << k.key << " = " << raw(k.section, k.key) << "\n";
    }
    return out.str();
}

std::string ExperimentConfig::experiment_id() const { return raw("experiment", "id"); }
bool ExperimentConfig::iterated() const { return raw("process", "kind") == "iterated"; }

InnovationModel ExperimentConfig::innovation() const {
    const double scale = get_double("innovation", "scale");
    Family family;
    try {
        family = family_from_string(raw("innovation", "family"));
    } catch (const std::exception& e) {
        throw ConfigError("innovation.family", e.what());
    }
    try {
        switch (family) {
            case Family::gaussian: return InnovationModel::gaussian(scale);
            case Family::uniform: return InnovationModel::uniform(scale);
            case Family::uniform_smoothwrap: return InnovationModel::uniform_smoothwrap(scale);
            case Family::student_t: return InnovationModel::student_t(get_double("innovation", "nu"), scale);
            case Family::logistic: return InnovationModel::logistic(scale);
        }
    } catch (const InvalidParameter& e) {
        throw ConfigError(family == Family::student_t ? "innovation.nu|scale" : "innovation.scale", e.what());
    }
    throw ConfigError("innovation.family", "unsupported family");
}

CoefficientSchedule ExperimentConfig::schedule() const {
    ScheduleKind kind;
    try {
        kind = schedule_kind_from_string(raw("process", "schedule"));
    } catch (const std::exception& e) {
        throw ConfigError("process.schedule", e.what());
    }
    try {
        switch (kind) {
            case ScheduleKind::iid: return CoefficientSchedule::iid();
            case ScheduleKind::geometric: return CoefficientSchedule::geometric(get_double("process", "rho"));
            case ScheduleKind::polynomial_srd: return CoefficientSchedule::polynomial_srd(get_double("process", "r"));
            case ScheduleKind::lrd: break;
        }
    } catch (const InvalidParameter& e) {
        throw ConfigError(kind == ScheduleKind::geometric ? "process.rho" : "process.r", e.what());
    }
    const auto& lk = raw("process", "L");
    SlowlyVarying L;
    if (lk == "const") {
        L = SlowlyVarying::constant(get_double("process", "L_value"));
    } else if (lk == "log_power") {
        L = SlowlyVarying::log_power(get_double("process", "L_value"));
    } else {
        throw ConfigError("process.L", "expected const or log_power, got '" + lk + "'");
    }
    try {
        return CoefficientSchedule::lrd(get_double("process", "beta"), L);
    } catch (const InvalidParameter& e) {
        const bool beta_bad = std::string(e.what()).find("beta") != std::string::npos;
        throw ConfigError(beta_bad ? "process.beta" : "process.L_value", e.what());
    }
}

IteratedMapModel ExperimentConfig::map_model() const {
    MapKind kind;
    try {
        kind = map_kind_from_string(raw("process", "map"));
    } catch (const std::exception& e) {
        throw ConfigError("process.map", e.what());
    }
    const auto eps = innovation();
    const auto burn = get_int("process", "burn_in");
    try {
        switch (kind) {
            case MapKind::ar1: return IteratedMapModel::ar1(get_double("process", "a"), eps, burn);
            case MapKind::arch1:
                return IteratedMapModel::arch1(get_double("process", "c0"), get_double("process", "c1"), eps, burn);
            case MapKind::tar:
                return IteratedMapModel::tar(get_double("process", "phi_plus"), get_double("process", "phi_minus"),
                                             eps, burn);
        }
    } catch (const InvalidParameter& e) {
        const char* field = kind == MapKind::ar1 ? "process.a" : kind == MapKind::arch1 ? "process.c1" : "process.phi_plus";
        throw ConfigError(field, e.what());
    }
    throw ConfigError("process.map", "unsupported map");
}

double ExperimentConfig::truncation_tolerance() const { return get_double("process", "truncation_tolerance"); }
std::int64_t ExperimentConfig::max_lag() const { return get_int("process", "max_lag"); }

FarPast ExperimentConfig::far_past() const {
    const auto& v = raw("process", "far_past");
    if (v == "none") return FarPast::none;
    if (v == "gaussian") return FarPast::gaussian;
    throw ConfigError("process.far_past", "expected none or gaussian");
}
std::vector<std::int64_t> ExperimentConfig::n_grid() const { return parse_n_grid(raw("experiment", "n_grid")); }
std::int64_t ExperimentConfig::n() const { return get_int("experiment", "n"); }
std::int64_t ExperimentConfig::replicates() const { return get_int("experiment", "replicates"); }
double ExperimentConfig::p() const { return get_double("experiment", "p"); }
double ExperimentConfig::p0() const { return get_double("experiment", "p0"); }
double ExperimentConfig::p1() const { return get_double("experiment", "p1"); }
bool ExperimentConfig::corrected() const { return get_bool("experiment", "corrected"); }
int ExperimentConfig::grid_points() const { return static_cast<int>(get_int("experiment", "grid_points")); }
std::int64_t ExperimentConfig::oracle_replicates() const { return get_int("experiment", "oracle_replicates"); }
std::uint64_t ExperimentConfig::seed() const { return static_cast<std::uint64_t>(get_int("experiment", "seed")); }
int ExperimentConfig::jobs() const { return static_cast<int>(get_int("experiment", "jobs")); }
double ExperimentConfig::window_scale() const { return get_double("experiment", "window_scale"); }
double ExperimentConfig::window_exponent() const { return get_double("experiment", "window_exponent"); }
double ExperimentConfig::center_level() const { return get_double("experiment", "center_level"); }
double ExperimentConfig::x_level() const { return get_double("experiment", "x_level"); }
double ExperimentConfig::gamma() const {
    if (raw("experiment", "gamma").empty()) return 0.5 - get_double("process", "beta");
    return get_double("experiment", "gamma");
}
std::string ExperimentConfig::branch() const { return raw("experiment", "branch"); }
std::string ExperimentConfig::winsor() const { return raw("experiment", "winsor"); }
double ExperimentConfig::alpha() const { return get_double("experiment", "alpha"); }
std::int64_t ExperimentConfig::lags() const { return get_int("experiment", "lags"); }
std::filesystem::path ExperimentConfig::output_dir() const { return raw("output", "dir"); }
bool ExperimentConfig::write_csv() const { return get_bool("output", "csv"); }

void ExperimentConfig::validate() const {
    const auto& kind = raw("process", "kind");
    if (kind != "linear" && kind != "iterated") throw ConfigError("process.kind", "expected linear or iterated");
    innovation();
    if (iterated()) {
        map_model();
    } else {
        schedule();
    }
    if (!(truncation_tolerance() > 0.0)) throw ConfigError("process.truncation_tolerance", "must be positive");
    if (max_lag() < 1) throw ConfigError("process.max_lag", "must be >= 1");
    if (far_past() == FarPast::gaussian) {
        const auto eps = innovation();
        if (iterated() || !schedule().long_memory()) {
            throw ConfigError("process.far_past", "gaussian needs a linear process with the lrd schedule");
        }
        if (!eps.symmetric() || !(eps.alpha_moment() > 2.0)) {
            throw ConfigError("process.far_past", "gaussian needs centered innovations with finite variance");
        }
    }
    if (get_int("process", "burn_in") < 0) throw ConfigError("process.burn_in", "must be >= 0");

    const auto grid = n_grid();
    if (grid.empty()) throw ConfigError("experiment.n_grid", "must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 16) throw ConfigError("experiment.n_grid", "every n must be >= 16");
        if (i > 0 && grid[i] <= grid[i - 1]) throw ConfigError("experiment.n_grid", "must be strictly increasing");
    }
    if (n() < 16) throw ConfigError("experiment.n", "must be >= 16");
    if (replicates() < 30) throw ConfigError("experiment.replicates", "must be >= 30");
    auto level = [&](const char* key) {
        const double v = get_double("experiment", key);
        if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string("experiment.") + key, "must lie in (0, 1)");
        return v;
    };
    level("p");
    level("center_level");
    level("x_level");
    if (!(level("p0") < level("p1"))) throw ConfigError("experiment.p1", "p0 < p1 required");
    corrected();
    if (grid_points() < 1) throw ConfigError("experiment.grid_points", "must be >= 1");
    if (oracle_replicates() < 1) throw ConfigError("experiment.oracle_replicates", "must be >= 1");
    seed();
    if (jobs() < 1) throw ConfigError("experiment.jobs", "must be >= 1");
    if (!(window_scale() >= 0.0)) throw ConfigError("experiment.window_scale", "must be >= 0");
    window_exponent();
    const double g = gamma();
    if (!(g > -1.0 && g < 0.0)) throw ConfigError("experiment.gamma", "must lie in (-1, 0)");
    const auto& br = branch();
    if (br != "auto" && br != "gaussian" && br != "rosenblatt") {
        throw ConfigError("experiment.branch", "expected auto, gaussian or rosenblatt");
    }
    const auto& w = winsor();
    if (w != "none" && w != "display" && w != "shifted") {
        throw ConfigError("experiment.winsor", "expected none, display or shifted");
    }
    if (!(alpha() > 0.0)) throw ConfigError("experiment.alpha", "must be positive");
    if (lags() < 1) throw ConfigError("experiment.lags", "must be >= 1");
    if (output_dir().empty()) throw ConfigError("output.dir", "must not be empty");
    write_csv();
}

}  // namespace bahadur
