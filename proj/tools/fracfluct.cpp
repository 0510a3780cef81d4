// Command-line front end for the registered experiments.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fracfluct/harness.hpp>

namespace fh = fracfluct::harness;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
    std::optional<std::string> eps;
    std::optional<std::size_t> paths;
    std::optional<int> steps;
    std::optional<double> hurst;
    std::optional<std::string> diagram;
    std::optional<std::string> model;
    std::vector<std::string> settings;
    std::string format = "csv,json,plot";
    bool quiet = false;
};

void add_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "config file (key = value, [section] headers)");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--eps", o.eps, "comma-separated epsilon list");
    cmd->add_option("--paths", o.paths, "replicate count");
    cmd->add_option("--steps", o.steps, "time steps");
    cmd->add_option("--hurst", o.hurst, "Hurst parameter in (1/2, 1)");
    cmd->add_option("--diagram", o.diagram, "diagram for jtilde-scaling, e.g. \"delta=1,2;3,4 p=1,3;2,4\"");
    cmd->add_option("--model", o.model, "catalogue model id");
    cmd->add_option("--set", o.settings, "extra key=value setting (repeatable)");
    cmd->add_option("--format", o.format, "outputs to write: any of csv,json,plot");
    cmd->add_flag("--quiet", o.quiet, "only print the verdict line");
}

fh::ExperimentConfig build_config(const std::string& experiment, const Overrides& o) {
    fh::ExperimentConfig c = fh::default_config(experiment);
    if (!o.config.empty()) fh::apply_config_file(c, o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.workers) c.workers = *o.workers;
    if (o.out) c.out_dir = *o.out;
    if (o.eps) fh::apply_setting(c, "epsilons", *o.eps);
    if (o.paths) fh::apply_setting(c, "paths", std::to_string(*o.paths));
    if (o.steps) c.n_steps = *o.steps;
    if (o.hurst) c.hurst = *o.hurst;
    if (o.diagram) c.diagram = *o.diagram;
    if (o.model) c.model = *o.model;
    for (const auto& kv : o.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        fh::apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    c.validate();
    return c;
}

unsigned parse_formats(const std::string& s) {
    unsigned f = 0;
    for (const auto& part : CLI::detail::split(s, ',')) {
        const auto t = CLI::detail::trim_copy(part);
        if (t == "csv") f |= fh::emit_csv;
        else if (t == "json") f |= fh::emit_json;
        else if (t == "plot") f |= fh::emit_plot;
        else if (!t.empty()) throw std::invalid_argument("unknown format '" + t + "'");
    }
    return f;
}

bool run_one(const std::string& experiment, const Overrides& o) {
    const fh::ExperimentConfig c = build_config(experiment, o);
    const fh::ExperimentReport r = fh::run_experiment(c);
    fh::emit(r, c.out_dir, parse_formats(o.format));
    if (!o.quiet)
        for (const auto& ch : r.checks) {
            char line[512];
            std::snprintf(line, sizeof line, "  %s %s: %.6g %s %.6g", ch.passed ? "PASS" : "FAIL", ch.name.c_str(), ch.value,
                          ch.relation.c_str(), ch.threshold);
            std::cout << line << "\n";
        }
    char verdict[256];
    std::snprintf(verdict, sizeof verdict, "%s %s (%zu replicates, %.1f s)", r.passed() ? "PASS" : "FAIL", r.experiment.c_str(),
                  r.replicates, r.wall_seconds);
    std::cout << verdict << std::endl;
    return r.passed();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fluctuation experiments for slow/fast systems driven by fractional noise"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fh::code_version);
    Overrides o;
    std::vector<std::pair<CLI::App*, std::string>> subs;
    for (const auto& e : fh::experiment_registry()) {
        CLI::App* cmd = app.add_subcommand(e.name, e.summary);
        cmd->alias(e.letter);
        add_flags(cmd, o);
        subs.emplace_back(cmd, e.name);
    }
    CLI::App* all = app.add_subcommand("all", "run every registered experiment in turn");
    add_flags(all, o);
    app.add_subcommand("list", "list the registered experiments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list")) {
            for (const auto& e : fh::experiment_registry()) std::cout << e.letter << "  " << e.name << "  " << e.summary << "\n";
            return 0;
        }
        if (all->parsed()) {
            bool ok = true;
            for (const auto& e : fh::experiment_registry()) ok = run_one(e.name, o) && ok;
            return ok ? 0 : 1;
        }
        for (const auto& [cmd, name] : subs)
            if (cmd->parsed()) return run_one(name, o) ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
