#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "erwlab/config.hpp"
#include "erwlab/errors.hpp"
#include "erwlab/experiments.hpp"
#include "erwlab/parallel.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::uint64_t seed = 1;
    bool seed_set = false;
    int workers = 0;
    std::string out_dir = "out";
    bool check = false;
    std::vector<std::string> overrides;
    double alpha = 0.0;
    bool alpha_set = false;
    std::int64_t n = 0;
    bool n_set = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "INI config file with a per-experiment section");
    cmd->add_option("--seed", opts.seed, "master RNG seed")->each([&](const std::string&) {
        opts.seed_set = true;
    });
    cmd->add_option("--workers", opts.workers, "worker threads (0 = all cores)");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_flag("--check", opts.check, "evaluate acceptance assertions; exit 3 on failure");
    cmd->add_option("--set", opts.overrides, "override a parameter, key=value (repeatable)");
    cmd->add_option("--alpha", opts.alpha, "memory parameter override")
        ->each([&](const std::string&) { opts.alpha_set = true; });
    cmd->add_option("--n", opts.n, "scale parameter override")->each([&](const std::string&) {
        opts.n_set = true;
    });
}

erwlab::ExperimentConfig build_config(const std::string& experiment, const CommonOptions& opts) {
    erwlab::ExperimentConfig cfg;
    if (!opts.config_path.empty())
        cfg = erwlab::load_config_file(opts.config_path, experiment);
    cfg.experiment = experiment;
    if (opts.seed_set || opts.config_path.empty()) cfg.master_seed = opts.seed;
    cfg.output_dir = opts.out_dir;
    cfg.workers = opts.workers >= 1 ? opts.workers : erwlab::effective_workers(0);
    cfg.check = opts.check;
    if (opts.alpha_set) cfg.params["alpha"] = std::to_string(opts.alpha);
    if (opts.n_set) cfg.params["n"] = std::to_string(opts.n);
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw erwlab::ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return cfg;
}

int run_experiment(const std::string& experiment, const CommonOptions& opts) {
    const auto cfg = build_config(experiment, opts);
    const auto manifest = erwlab::run(cfg);
    std::cout << experiment << ": wrote " << manifest.outputs.size() << " file(s) to "
              << cfg.output_dir.string() << " (config " << manifest.config_hash << ", "
              << manifest.wall_time_s << " s)\n";
    if (cfg.check) {
        std::cout << "checks: " << (manifest.checks_passed ? "PASS" : "FAIL") << "\n";
        if (!manifest.checks_passed) return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"erwlab: simulation and verification lab for the plane elephant random walk"};
    app.require_subcommand(1);

    std::map<std::string, CommonOptions> opts;
    for (const auto& name : erwlab::known_experiments()) {
        auto* cmd = app.add_subcommand(name, "run the " + name + " experiment");
        add_common(cmd, opts[name]);
    }

    CommonOptions validate_opts;
    std::string validate_experiment;
    auto* validate_cmd = app.add_subcommand("validate", "check a config without running");
    validate_cmd->add_option("--experiment", validate_experiment, "experiment name")->required();
    add_common(validate_cmd, validate_opts);

    std::string manifest_path;
    std::string plot_kind;
    auto* plot_cmd = app.add_subcommand("plot", "emit tidy plot data from a finished run");
    plot_cmd->add_option("--manifest", manifest_path, "path to manifest_<experiment>.json")
        ->required();
    plot_cmd->add_option("--plot", plot_kind, "msd | return | triadic | ks")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& name : erwlab::known_experiments())
            if (app.got_subcommand(name)) return run_experiment(name, opts[name]);
        if (app.got_subcommand(validate_cmd)) {
            const auto cfg = build_config(validate_experiment, validate_opts);
            erwlab::validate(cfg, std::cout);
            return 0;
        }
        if (app.got_subcommand(plot_cmd)) {
            const auto path = erwlab::emit_plot_data(manifest_path, plot_kind);
            std::cout << "wrote " << path.string() << "\n";
            return 0;
        }
    } catch (const erwlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const erwlab::UnknownPlot& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
