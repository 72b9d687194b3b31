// Command-line runner: one subcommand per experiment.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "vacant/experiments.hpp"

using namespace vacant;

namespace {

struct Common {
    std::string config;
    std::string out = "out";
    std::int64_t seed = -1;
    int threads = 1;
    double budget = 3600.0;
    std::vector<std::string> overrides;
    bool dry_run = false;
};

int run(const std::string& name, const Common& c) {
    KeyValueConfig cfg;
    if (!c.config.empty()) cfg = KeyValueConfig::load(c.config);
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed >= 0) cfg.set("seed", std::to_string(c.seed));
    if (c.dry_run) {
        std::cout << name << ": estimated " << format_number(estimate_cost(name, cfg)) << " CPU seconds\n";
        return 0;
    }
    RunOptions opt;
    opt.threads = c.threads;
    opt.budget = c.budget;
    const ExperimentResult r = run_experiment(name, cfg, opt);
    write_outputs(r, c.out);
    for (const auto& [stem, t] : r.tables)
        std::cout << c.out << '/' << stem << ".csv: " << t.rows() << " rows\n";
    return 0;
}

std::string key_help(const std::string& name) {
    std::string s = "config keys (default):";
    for (const auto& [k, v] : experiment_keys(name)) s += "\n  " + k + " = " + v;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vacant set of Brownian motion on the unit torus: experiments and reference values"};
    app.require_subcommand(1);
    Common common;
    for (const auto& name : experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->footer(key_help(name));
        sub->add_option("--config", common.config, "key = value config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "base seed (replica i uses seed + i)")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", common.out, "output directory")->capture_default_str();
        sub->add_option("--threads", common.threads, "worker threads")->capture_default_str();
        sub->add_option("--budget", common.budget, "refuse runs estimated above this many CPU seconds")
            ->capture_default_str();
        sub->add_option("--set", common.overrides, "override a config key (key=value), repeatable");
        sub->add_flag("--dry-run", common.dry_run, "print the cost estimate and exit");
        sub->callback([name, &common] { throw CLI::RuntimeError(run(name, common)); });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::RuntimeError& e) {
        return e.get_exit_code();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ResourceRefusal& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
