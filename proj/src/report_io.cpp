#include "bahadur/report_io.hpp"

#include "bahadur/errors.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace bahadur {

namespace {

const char* const kColumns[] = {"experiment_id", "process_kind",  "n",           "replicate",
                                "seed",          "p",             "xi_np",       "linear_term",
                                "correction_term", "remainder_srd", "remainder_lrd", "statistic_name",
                                "statistic_value"};
constexpr std::size_t kColumnCount = sizeof(kColumns) / sizeof(kColumns[0]);

void put_double(std::string& out, double v) {
    if (std::isnan(v)) {
        out += "nan";
        return;
    }
    if (std::isinf(v)) {
        out += v > 0 ? "inf" : "-inf";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

double get_double(const std::string& field) {
    if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw InvalidParameter("raw csv: bad number '" + field + "'");
    }
    return v;
}

template <class Int>
Int get_int(const std::string& field) {
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw InvalidParameter("raw csv: bad integer '" + field + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

nlohmann::json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

template <class T>
nlohmann::json optional_number(const std::optional<T>& v) {
    if (!v) return nullptr;
    return number(*v);
}

nlohmann::json series_json(const Series& s) {
    nlohmann::json per_n = nlohmann::json::array();
    for (const auto& p : s.per_n) {
        per_n.push_back({{"n", p.n},
                         {"median", number(p.summary.median)},
                         {"mean", number(p.summary.mean)},
                         {"q25", number(p.summary.q25)},
                         {"q75", number(p.summary.q75)},
                         {"count", p.summary.count}});
    }
    return {{"statistic_name", s.statistic_name},
            {"per_n", per_n},
            {"slope", optional_number(s.slope)},
            {"intercept", optional_number(s.intercept)},
            {"slope_stderr", optional_number(s.slope_stderr)},
            {"theoretical_exponent", optional_number(s.theoretical_exponent)}};
}

}  // namespace

std::string raw_csv(const std::vector<RawRow>& rows) {
    std::string out;
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (i) out += ',';
        out += kColumns[i];
    }
    out += '\n';
    for (const auto& r : rows) {
        out += r.experiment_id;
        out += ',';
        out += r.process_kind;
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.replicate);
        out += ',';
        out += std::to_string(r.seed);
        for (double v : {r.p, r.xi_np, r.linear_term, r.correction_term, r.remainder_srd, r.remainder_lrd}) {
            out += ',';
            put_double(out, v);
        }
        out += ',';
        out += r.statistic_name;
        out += ',';
        put_double(out, r.statistic_value);
        out += '\n';
    }
    return out;
}

void write_raw_csv(const std::vector<RawRow>& rows, const std::filesystem::path& path) {
    write_text(path, raw_csv(rows));
}

std::vector<RawRow> parse_raw_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidParameter("raw csv: empty input");
    const auto header = split(line);
    if (header.size() != kColumnCount) throw InvalidParameter("raw csv: unexpected header");
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (header[i] != kColumns[i]) throw InvalidParameter("raw csv: unexpected column '" + header[i] + "'");
    }
    std::vector<RawRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != kColumnCount) throw InvalidParameter("raw csv: wrong field count in '" + line + "'");
        RawRow r;
        r.experiment_id = f[0];
        r.process_kind = f[1];
        r.n = get_int<std::int64_t>(f[2]);
        r.replicate = get_int<std::int64_t>(f[3]);
        r.seed = get_int<std::uint64_t>(f[4]);
        r.p = get_double(f[5]);
        r.xi_np = get_double(f[6]);
        r.linear_term = get_double(f[7]);
        r.correction_term = get_double(f[8]);
        r.remainder_srd = get_double(f[9]);
        r.remainder_lrd = get_double(f[10]);
        r.statistic_name = f[11];
        r.statistic_value = get_double(f[12]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<RawRow> read_raw_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidParameter("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_raw_csv(buf.str());
}

nlohmann::json to_json(const RateReport& report) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : report.series) series.push_back(series_json(s));
    return {{"experiment_id", report.experiment_id}, {"series", series}};
}

nlohmann::json to_json(const DistributionReport& report) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : report.series) {
        const auto& d = s.dist;
        series.push_back({{"statistic_name", s.statistic_name},
                          {"mean", number(d.mean)},
                          {"variance", number(d.variance)},
                          {"skewness", number(d.skewness)},
                          {"excess_kurtosis", number(d.excess_kurtosis)},
                          {"normality", number(d.normality)},
                          {"count", d.count},
                          {"moments_defined", d.moments_defined}});
    }
    return {{"experiment_id", report.experiment_id}, {"series", series}};
}

nlohmann::json to_json(const GmcReport& report) {
    nlohmann::json distances = nlohmann::json::array();
    for (Eigen::Index k = 0; k < report.mean_distance.size(); ++k) distances.push_back(number(report.mean_distance[k]));
    return {{"mean_distance", distances},
            {"usable_lags", report.usable_lags},
            {"slope", number(report.slope)},
            {"intercept", number(report.intercept)},
            {"r_hat", number(report.r_hat)},
            {"degenerate", report.degenerate}};
}

nlohmann::json config_echo(const ExperimentConfig& config) {
    nlohmann::json echo = nlohmann::json::object();
    for (const auto& k : config_schema()) echo[k.section][k.key] = config.raw(k.section, k.key);
    return echo;
}

ExperimentConfig config_from_echo(const nlohmann::json& echo) {
    ExperimentConfig config;
    for (const auto& [section, keys] : echo.items()) {
        for (const auto& [key, value] : keys.items()) config.set(section, key, value.get<std::string>());
    }
    return config;
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.to_ini()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json report_json(const ExperimentResult& result, const ExperimentConfig& config) {
    nlohmann::json j;
    j["experiment_id"] = result.experiment_id;
    j["kind"] = result.kind;
    j["config"] = config_echo(config);
    if (result.rate) {
        const auto primary = series_json(result.rate->primary());
        j["statistic_name"] = primary["statistic_name"];
        j["per_n"] = primary["per_n"];
        j["slope"] = primary["slope"];
        j["slope_stderr"] = primary["slope_stderr"];
        j["theoretical_exponent"] = primary["theoretical_exponent"];
        j["series"] = to_json(*result.rate)["series"];
        j["note"] = "rates are checked as log-log slopes of per-n medians";
    }
    if (result.dist) j["distribution"] = to_json(*result.dist)["series"];
    if (result.gmc) j["gmc"] = to_json(*result.gmc);
    nlohmann::json facts = nlohmann::json::object();
    for (const auto& [k, v] : result.facts) facts[k] = number(v);
    j["facts"] = facts;
    j["warnings"] = result.warnings;
    j["failures"] = result.failures;
    j["attempted"] = result.attempted;
    return j;
}

nlohmann::json to_json(const RunManifest& m) {
    return {{"config_hash", m.config_hash}, {"version", m.version}, {"started", m.started},
            {"finished", m.finished},       {"files", m.files},     {"warnings", m.warnings},
            {"partial", m.partial},         {"failures", m.failures}};
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace bahadur
