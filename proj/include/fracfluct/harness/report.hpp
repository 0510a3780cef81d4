#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace fracfluct::harness {

inline constexpr const char* code_version = "0.1.0";

struct ReportRow {
    double epsilon = 0.0;  // 0 for statistics that are not indexed by epsilon
    std::string statistic;
    double estimate = 0.0;
    double std_error = 0.0;
    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ReportCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    std::string relation;  // "<=", ">=", "<", ">", "=="
    double threshold = 0.0;
    friend bool operator==(const ReportCheck&, const ReportCheck&) = default;
};

using Curve = std::vector<std::pair<double, double>>;

struct ExperimentReport {
    std::string experiment;
    std::map<std::string, std::string> config;
    std::string version = code_version;
    double wall_seconds = 0.0;
    std::size_t replicates = 0;
    std::size_t failed_replicates = 0;
    std::vector<ReportRow> rows;
    std::vector<ReportCheck> checks;
    std::map<std::string, Curve> curves;
    std::vector<std::string> notes;

    void add(double eps, std::string stat, double estimate, double std_error) {
        rows.push_back({eps, std::move(stat), estimate, std_error});
    }
    bool check(std::string name, double value, const std::string& rel, double threshold) {
        bool ok = false;
        if (rel == "<=") ok = value <= threshold;
        else if (rel == ">=") ok = value >= threshold;
        else if (rel == "<") ok = value < threshold;
        else if (rel == ">") ok = value > threshold;
        else if (rel == "==") ok = value == threshold;
        else throw std::invalid_argument("check: unknown relation '" + rel + "'");
        checks.push_back({std::move(name), ok, value, rel, threshold});
        return ok;
    }
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    friend bool operator==(const ExperimentReport& a, const ExperimentReport& b) = default;
};

// CSV numbers use %.17g (round-trip exact, '.' decimal separator in the C locale).
inline std::string report_csv(const ExperimentReport& r) {
    std::string s = "experiment,epsilon,statistic,estimate,stderr\n";
    for (const auto& row : r.rows)
        s += r.experiment + "," + format_double(row.epsilon) + "," + row.statistic + "," + format_double(row.estimate) + "," +
             format_double(row.std_error) + "\n";
    return s;
}

inline std::string checks_csv(const ExperimentReport& r) {
    std::string s = "experiment,check,passed,value,relation,threshold\n";
    for (const auto& c : r.checks)
        s += r.experiment + "," + c.name + "," + (c.passed ? "1" : "0") + "," + format_double(c.value) + "," + c.relation + "," +
             format_double(c.threshold) + "\n";
    return s;
}

inline std::string curve_data(const Curve& c) {
    std::string s;
    for (const auto& [x, y] : c) s += format_double(x) + " " + format_double(y) + "\n";
    return s;
}

namespace detail {

// Non-finite doubles have no JSON literal; they are stored as strings.
inline nlohmann::json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}
inline double num(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    throw std::invalid_argument("report JSON: bad number '" + s + "'");
}

}  // namespace detail

inline nlohmann::json to_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["config"] = r.config;
    j["version"] = r.version;
    j["wall_seconds"] = detail::num(r.wall_seconds);
    j["replicates"] = r.replicates;
    j["failed_replicates"] = r.failed_replicates;
    j["passed"] = r.passed();
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows)
        j["rows"].push_back({{"epsilon", detail::num(row.epsilon)},
                             {"statistic", row.statistic},
                             {"estimate", detail::num(row.estimate)},
                             {"stderr", detail::num(row.std_error)}});
    j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back({{"name", c.name},
                               {"passed", c.passed},
                               {"value", detail::num(c.value)},
                               {"relation", c.relation},
                               {"threshold", detail::num(c.threshold)}});
    j["curves"] = nlohmann::json::object();
    for (const auto& [name, pts] : r.curves) {
        auto& arr = j["curves"][name] = nlohmann::json::array();
        for (const auto& [x, y] : pts) arr.push_back({detail::num(x), detail::num(y)});
    }
    j["notes"] = r.notes;
    return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
    ExperimentReport r;
    r.experiment = j.at("experiment").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.version = j.at("version").get<std::string>();
    r.wall_seconds = detail::num(j.at("wall_seconds"));
    r.replicates = j.at("replicates").get<std::size_t>();
    r.failed_replicates = j.at("failed_replicates").get<std::size_t>();
    for (const auto& row : j.at("rows"))
        r.rows.push_back({detail::num(row.at("epsilon")), row.at("statistic").get<std::string>(), detail::num(row.at("estimate")),
                          detail::num(row.at("stderr"))});
    for (const auto& c : j.at("checks"))
        r.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(), detail::num(c.at("value")),
                            c.at("relation").get<std::string>(), detail::num(c.at("threshold"))});
    for (const auto& [name, arr] : j.at("curves").items()) {
        Curve cv;
        for (const auto& pt : arr) cv.emplace_back(detail::num(pt.at(0)), detail::num(pt.at(1)));
        r.curves[name] = std::move(cv);
    }
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
}

enum EmitFormat : unsigned { emit_csv = 1u, emit_json = 2u, emit_plot = 4u, emit_all = 7u };

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << content;
    out.close();
    if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

}  // namespace detail

// Writes <exp>.csv, <exp>_checks.csv, <exp>.json and <exp>_<curve>.dat; returns the paths written.
inline std::vector<std::filesystem::path> emit(const ExperimentReport& r, const std::filesystem::path& dir, unsigned formats = emit_all) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string& name, const std::string& content) {
        const auto p = dir / name;
        detail::write_file(p, content);
        written.push_back(p);
    };
    if (formats & emit_csv) {
        put(r.experiment + ".csv", report_csv(r));
        put(r.experiment + "_checks.csv", checks_csv(r));
    }
    if (formats & emit_json) put(r.experiment + ".json", to_json(r).dump(2) + "\n");
    if (formats & emit_plot)
        for (const auto& [name, c] : r.curves) put(r.experiment + "_" + name + ".dat", curve_data(c));
    return written;
}

inline ExperimentReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad report JSON in '" + path.string() + "': " + e.what());
    }
    return report_from_json(j);
}

}  // namespace fracfluct::harness
