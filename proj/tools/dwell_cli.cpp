// Command-line front end: run, sweep, presets, validate.
//
// Exit codes: 0 success, 1 numerical abort, 2 usage or configuration error.

#include "dwell/dwell.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace {

struct CommonOptions
{
    std::string config_path;
    std::string preset;
    bool paper_mass = false;
    std::optional<double> gamma, lambda2, m2, dt, t_final;
    std::optional<std::size_t> n_classical;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string out_dir;
    std::string basename;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("config", o.config_path, "Scenario configuration file");
    cmd->add_option("--preset", o.preset, "Built-in preset (fig1, fig2, fig3, fig4)");
    cmd->add_flag("--paper-mass", o.paper_mass, "Use m2 = 1e-4 m1 for fig1/fig2 (large grid, long runtime)");
    cmd->add_option("--gamma", o.gamma, "Interaction strength");
    cmd->add_option("--lambda2", o.lambda2, "Barrier height of particle 2");
    cmd->add_option("--m2", o.m2, "Mass of particle 2");
    cmd->add_option("--dt", o.dt, "Quantum time step");
    cmd->add_option("--t-final", o.t_final, "Final time");
    cmd->add_option("--N", o.n_classical, "Classical ensemble size");
    cmd->add_option("--seed", o.seed, "Classical ensemble seed");
    cmd->add_option("--workers", o.workers, "Worker threads");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--basename", o.basename, "Output file prefix");
    cmd->add_option("--set", o.sets, "Override any key: section.key=value");
}

dwell::ScenarioConfig build_config(const CommonOptions& o)
{
    std::string text;
    if (!o.config_path.empty()) {
        try {
            text = dwell::read_file(o.config_path);
        } catch (const std::runtime_error& e) {
            throw dwell::ConfigError(e.what());
        }
    }
    text += "\n[scenario]\n";
    if (!o.preset.empty()) {
        text += "preset = " + o.preset + "\n";
    }
    if (o.paper_mass) {
        text += "paper_mass = true\n";
    }
    std::vector<std::pair<std::string, std::string>> ov;
    auto num = [](double v) { return dwell::format_number(v); };
    if (o.gamma) {
        ov.emplace_back("potential.gamma", num(*o.gamma));
    }
    if (o.lambda2) {
        ov.emplace_back("potential.lambda2", num(*o.lambda2));
    }
    if (o.m2) {
        ov.emplace_back("potential.m2", num(*o.m2));
    }
    if (o.dt) {
        ov.emplace_back("time.dt", num(*o.dt));
    }
    if (o.t_final) {
        ov.emplace_back("time.t_final", num(*o.t_final));
    }
    if (o.n_classical) {
        ov.emplace_back("classical.N", std::to_string(*o.n_classical));
    }
    if (o.seed) {
        ov.emplace_back("classical.seed", std::to_string(*o.seed));
    }
    if (o.workers) {
        ov.emplace_back("workers", std::to_string(*o.workers));
    }
    if (!o.out_dir.empty()) {
        ov.emplace_back("output.dir", o.out_dir);
    }
    if (!o.basename.empty()) {
        ov.emplace_back("output.basename", o.basename);
    }
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw dwell::ConfigError("--set expects section.key=value, got '" + s + "'");
        }
        ov.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return dwell::parse_config(text, ov);
}

void print_presets()
{
    for (const auto& info : dwell::preset_list()) {
        const auto c = dwell::make_preset(info.name);
        const auto& p = c.params;
        std::printf("%s: %s\n", info.name.c_str(), info.description.c_str());
        std::printf("  m1=%g m2=%g k1=%g k2=%g lambda1=%g lambda2=%g a1=%g a2=%g gamma=%g l0=%g hbar=%g\n", p.m1, p.m2,
                    p.k1, p.k2, p.lambda1, p.lambda2, p.a1, p.a2, p.gamma, p.l0, p.hbar);
        std::printf("  packets: particle 1 %s, particle 2 %s, alpha=%g/%g\n", dwell::to_string(c.side1),
                    dwell::to_string(c.side2), c.alpha1, c.alpha2);
        std::printf("  grid %zux%zu L1=%g L2=%g dt=%g t_final=%g\n", c.grid.n1, c.grid.n2, c.grid.L1, c.grid.L2, c.dt,
                    c.t_final);
        if (c.sweep) {
            std::printf("  sweep %s:", c.sweep->parameter.c_str());
            for (double v : c.sweep->values) {
                std::printf(" %g", v);
            }
            std::printf("\n");
        }
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-particle double-well tunneling: quantum split-operator and classical ensemble runs"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    auto* run = app.add_subcommand("run", "Run one scenario");
    add_common(run, run_opts);

    CommonOptions sweep_opts;
    std::string sweep_param;
    std::vector<double> sweep_values;
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
    add_common(sweep, sweep_opts);
    sweep->add_option("--parameter", sweep_param, "gamma or lambda2");
    sweep->add_option("--values", sweep_values, "Sweep values")->delimiter(',');

    app.add_subcommand("presets", "List built-in presets");

    CommonOptions validate_opts;
    auto* validate = app.add_subcommand("validate", "Parse a configuration and print it fully resolved");
    add_common(validate, validate_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand("presets")) {
            print_presets();
            return 0;
        }
        if (app.got_subcommand(validate)) {
            if (validate_opts.config_path.empty() && validate_opts.preset.empty()) {
                std::cerr << "validate: a config file or --preset is required\n" << validate->help();
                return 2;
            }
            std::cout << dwell::to_config_text(build_config(validate_opts));
            return 0;
        }
        if (app.got_subcommand(run)) {
            const auto cfg = build_config(run_opts);
            const auto r = dwell::run_scenario(cfg);
            std::cout << dwell::manifest_text(r.manifest);
            return 0;
        }
        if (app.got_subcommand(sweep)) {
            auto cfg = build_config(sweep_opts);
            if (!sweep_param.empty() || !sweep_values.empty()) {
                dwell::SweepConfig s = cfg.sweep.value_or(dwell::SweepConfig{});
                if (!sweep_param.empty()) {
                    s.parameter = sweep_param;
                }
                if (!sweep_values.empty()) {
                    s.values = sweep_values;
                }
                cfg.sweep = s;
                dwell::validate_config(cfg);
            }
            const auto r = dwell::run_sweep(cfg);
            std::cout << dwell::manifest_text(r.manifest);
            return r.all_ok() ? 0 : 1;
        }
    } catch (const dwell::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const dwell::PropagationError& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
