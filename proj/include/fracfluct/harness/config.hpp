#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracfluct::harness {

struct ExperimentInfo {
    std::string name;
    std::string letter;
    std::string summary;
};

inline const std::vector<ExperimentInfo>& experiment_registry() {
    static const std::vector<ExperimentInfo> r{
        {"averaging-convergence", "a", "sup-distance between slow path and averaged path"},
        {"homogenization-covariance", "b", "variance of the rescaled noise against the limit covariance"},
        {"fluctuation-theorem", "c", "W1 between marginals of the fluctuation and of the limit equation"},
        {"lift-convergence", "d", "Chen relation of assembled lifts and convergence of the joint lift"},
        {"cross-independence", "e", "covariance between the rescaled noise and the driver"},
        {"cumulant-gaussianity", "f", "fourth cumulant of the mixed variable"},
        {"jtilde-scaling", "g", "scaling exponents of the diagram integrals"},
        {"residue-bound", "h", "bound certificates against solved controlled equations"},
        {"rde-wasserstein-stability", "i", "W1 stability of solutions under driver perturbation"},
    };
    return r;
}

// Full name from a full name or its letter alias.
inline std::string canonical_experiment(const std::string& name) {
    for (const auto& e : experiment_registry())
        if (e.name == name || e.letter == name) return e.name;
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

struct ExperimentConfig {
    std::string experiment;
    double hurst = 0.75;
    std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
    int n_steps = 4096;
    std::size_t paths = 10000;
    std::string model;
    std::vector<double> ou_rates{1.0};
    std::vector<double> points{0.5};
    double x0 = 0.5;
    double horizon = 1.0;
    std::uint64_t seed = 12345;
    int workers = 1;
    int resamples = 200;
    std::string out_dir = "results";
    std::string diagram;
    std::vector<double> perturbations{0.2, 0.05, 0.02, 0.005, 0.002};  // driver perturbation sweep

    void validate() const {
        canonical_experiment(experiment);
        if (!(hurst > 0.5 && hurst < 1.0)) throw std::invalid_argument("config: hurst must lie in (1/2, 1)");
        if (epsilons.empty()) throw std::invalid_argument("config: epsilon list is empty");
        for (double e : epsilons)
            if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("config: epsilon values must lie in (0, 1]");
        if (n_steps < 1) throw std::invalid_argument("config: steps must be >= 1");
        if (paths < 1) throw std::invalid_argument("config: paths must be >= 1");
        if (ou_rates.empty()) throw std::invalid_argument("config: ou_rates is empty");
        for (double a : ou_rates)
            if (!(a > 0.0)) throw std::invalid_argument("config: ou_rates must be positive");
        if (points.empty()) throw std::invalid_argument("config: points is empty");
        if (!(horizon > 0.0)) throw std::invalid_argument("config: horizon must be positive");
        if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
        if (resamples < 2) throw std::invalid_argument("config: resamples must be >= 2");
        if (perturbations.empty()) throw std::invalid_argument("config: perturbations is empty");
        for (double d : perturbations)
            if (!(d > 0.0)) throw std::invalid_argument("config: perturbations must be positive");
    }

    // Echo of every setting except the worker count and output directory, which do not affect results.
    std::map<std::string, std::string> echo() const;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

inline std::map<std::string, std::string> ExperimentConfig::echo() const {
    return {{"experiment", experiment},
            {"hurst", format_double(hurst)},
            {"epsilons", format_list(epsilons)},
            {"steps", std::to_string(n_steps)},
            {"paths", std::to_string(paths)},
            {"model", model},
            {"ou_rates", format_list(ou_rates)},
            {"points", format_list(points)},
            {"x0", format_double(x0)},
            {"horizon", format_double(horizon)},
            {"seed", std::to_string(seed)},
            {"resamples", std::to_string(resamples)},
            {"diagram", diagram},
            {"perturbations", format_list(perturbations)}};
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
    return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
    return out;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

}  // namespace detail

inline void apply_setting(ExperimentConfig& c, const std::string& key_raw, const std::string& value_raw) {
    const std::string key = detail::trim(key_raw);
    const std::string v = detail::trim(value_raw);
    if (key == "hurst") c.hurst = detail::parse_double(key, v);
    else if (key == "epsilons" || key == "eps") c.epsilons = detail::parse_list(key, v);
    else if (key == "steps" || key == "n_steps") c.n_steps = static_cast<int>(detail::parse_int(key, v));
    else if (key == "paths") {
        const long long p = detail::parse_int(key, v);
        if (p < 1) throw std::invalid_argument("config: paths must be >= 1");
        c.paths = static_cast<std::size_t>(p);
    } else if (key == "model") c.model = v;
    else if (key == "ou_rates") c.ou_rates = detail::parse_list(key, v);
    else if (key == "points") c.points = detail::parse_list(key, v);
    else if (key == "x0") c.x0 = detail::parse_double(key, v);
    else if (key == "horizon") c.horizon = detail::parse_double(key, v);
    else if (key == "seed") {
        std::size_t used = 0;
        unsigned long long s = 0;
        try {
            s = std::stoull(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size() || v.front() == '-') throw std::invalid_argument("config: 'seed' expects an unsigned integer");
        c.seed = s;
    } else if (key == "workers") c.workers = static_cast<int>(detail::parse_int(key, v));
    else if (key == "resamples") c.resamples = static_cast<int>(detail::parse_int(key, v));
    else if (key == "out") c.out_dir = v;
    else if (key == "diagram") c.diagram = v;
    else if (key == "perturbations") c.perturbations = detail::parse_list(key, v);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

// Per-experiment defaults; the replicate counts follow the acceptance envelope.
inline ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = canonical_experiment(experiment);
    const auto& e = c.experiment;
    if (e == "averaging-convergence") {
        c.paths = 200;
        c.model = "averaging-sine";
    } else if (e == "homogenization-covariance" || e == "cross-independence") {
        c.model = "homogenization-rational";
        c.points = {0.0, 0.5, 1.0};
    } else if (e == "fluctuation-theorem") {
        c.model = "averaging-sine";
    } else if (e == "lift-convergence") {
        c.n_steps = 512;
        c.paths = 4;
        c.model = "averaging-sine";
    } else if (e == "cumulant-gaussianity") {
        c.model = "averaging-rational";
    } else if (e == "jtilde-scaling") {
        c.epsilons = {1e-1, 1e-2, 1e-3, 1e-4};
        c.diagram = "delta=1,2;3,4 p=1,3;2,4";
        c.paths = 200000;  // Monte Carlo samples for the 6-node diagrams
    } else if (e == "residue-bound") {
        c.paths = 100;
        c.n_steps = 1024;
        c.epsilons = {1.0};
    } else if (e == "rde-wasserstein-stability") {
        c.paths = 2000;
        c.n_steps = 1024;
        c.model = "averaging-sine";
        c.epsilons = {1.0};
    }
    return c;
}

// "[section]" headers and "key = value" lines; '#' starts a comment. Keys under [run] (or before
// any header) apply to every experiment, keys under [<experiment name or letter>] only to that one.
inline void apply_config_text(ExperimentConfig& c, const std::string& text, const std::string& origin = "config") {
    std::stringstream ss(text);
    std::string line, section = "run";
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "run") section = canonical_experiment(section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected key = value");
        if (section != "run" && section != c.experiment) continue;
        try {
            apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
        } catch (const std::invalid_argument& err) {
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + err.what());
        }
    }
}

inline void apply_config_file(ExperimentConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(c, buf.str(), path);
}

}  // namespace fracfluct::harness
