// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

// peripore: run packaged scenarios from configuration files, sweep a parameter, run the
// self-checks.

#include <algorithm>
#include <cstdio>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "peripore/checks.hpp"
#include "peripore/cli_io.hpp"
#include "peripore/parallel.hpp"

using namespace peripore;

namespace {

struct Globals {
    bool deterministic = false;
    int threads = 0;
    bool desk_scale = false;
    bool long_run = false;
    bool quiet = false;
};

Log make_log(const Globals& g, std::vector<std::string>* keep = nullptr) {
    return [&g, keep](const std::string& line) {
        if (keep) keep->push_back(line);
        if (!g.quiet) std::fprintf(stderr, "[peripore] %s\n", line.c_str());
    };
}

std::optional<bool> scale_override(const Globals& g) {
    if (g.long_run) return false;
    if (g.desk_scale) return true;
    return std::nullopt;
}

RunConfig load(const Globals& g, const std::string& config, const std::string& scenario, const Log& log) {
    if (!config.empty()) return parse_config(config, log, scale_override(g));
    if (scenario.empty()) throw ConfigError("either a configuration file or --scenario is required");
    return parse_config_text("{\"scenario\": \"" + scenario + "\"}", log, scale_override(g));
}

void apply_globals(const Globals& g, RunConfig& rc) {
    if (g.deterministic && rc.scenario.linear_solver == "auto") rc.scenario.linear_solver = "sparselu";
}

int exit_for(const RunResult& r) { return r.complete ? kExitOk : r.error_class ? r.error_class : kExitSolver; }

int run_one(const Globals& g, RunConfig rc, const std::filesystem::path& dir, const Log& log) {
    apply_globals(g, rc);
    log("scenario " + rc.scenario.name + " (" + (rc.scenario.desk_scale ? "desk scale" : "full scale") +
        "), config hash " + config_hash(rc));
    RunOptions opt;
    Index last = 0;
    opt.sink = [&](const StepReport& s) {
        if (s.step - last >= 1000) {
            last = s.step;
            char buf[96];
            std::snprintf(buf, sizeof buf, "step %zu  t = %.6g s  %d iterations", std::size_t(s.step), s.time,
                          s.iterations);
            log(buf);
        }
    };
    const RunResult r = simulate(rc.scenario, opt);
    const auto files = write_outputs(r, rc, dir, {g.deterministic, thread_count()});
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu steps, %ld iterations, %ld factorizations, %.2f s; %zu files in %s",
                  std::size_t(r.stats.steps), r.stats.iterations, r.stats.factorizations, r.stats.wall_seconds,
                  files.size(), dir.string().c_str());
    log(buf);
    if (!r.complete) log("run stopped early: " + r.error);
    return exit_for(r);
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const Error& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    }
}

void set_param(RunConfig& rc, const std::string& name, double v) {
    auto& c = rc.scenario;
    if (name == "G") c.G = v;
    else if (name == "dt") c.newmark.dt = v;
    else if (name == "spacing") c.grid.spacing = v;
    else if (name == "t_end") c.t_end = v;
    else throw ConfigError("sweep parameter '" + name + "' is not one of G, dt, spacing, t_end");
    c.validate();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stabilized nonlocal poromechanics solver"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    Globals g;
    app.add_flag("--deterministic", g.deterministic, "Use the pure-Eigen sparse LU and record the mode");
    app.add_option("--threads", g.threads, "Worker threads (0 keeps the OpenMP default)")->check(CLI::NonNegativeNumber);
    app.add_flag("--desk-scale", g.desk_scale, "Use the reduced geometry of the scenario");
    app.add_flag("--long-run", g.long_run, "Use the full-size geometry of the scenario");
    app.add_flag("-q,--quiet", g.quiet, "Suppress log output");

    auto* list = app.add_subcommand("list-scenarios", "Print the packaged scenario names");

    std::string config, scenario, output;
    auto* run = app.add_subcommand("run", "Run one configuration");
    run->add_option("file", config, "Configuration file");
    run->add_option("--config", config, "Configuration file");
    run->add_option("--scenario", scenario, "Run a packaged scenario with its defaults");
    run->add_option("-o,--output", output, "Output directory (overrides output.directory)");

    auto* verify = app.add_subcommand("verify", "Run the tangent, patch and quadrature checks");

    std::string param = "G";
    std::vector<double> values;
    auto* sweep = app.add_subcommand("sweep", "Run one configuration for several values of a parameter");
    sweep->add_option("file", config, "Configuration file");
    sweep->add_option("--config", config, "Configuration file");
    sweep->add_option("--scenario", scenario, "Sweep a packaged scenario");
    sweep->add_option("--param", param, "Parameter: G, dt, spacing or t_end");
    sweep->add_option("--values", values, "Comma separated values")->delimiter(',')->required();
    sweep->add_option("-o,--output", output, "Parent directory of the run directories");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    if (g.desk_scale && g.long_run) {
        std::fprintf(stderr, "configuration error: --desk-scale and --long-run are exclusive\n");
        return kExitConfig;
    }
    if (g.threads > 0) set_thread_count(g.threads);
    const Log log = make_log(g);

    if (*list) {
        for (const auto& n : scenario_names()) std::printf("%s\n", n.c_str());
        return kExitOk;
    }

    if (*verify) {
        return guarded([&] {
            bool all = true;
            for (const auto& c : checks::verification_suite()) {
                std::printf("%-4s %-46s %.3e (limit %.1e)  %s\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.measured,
                            c.limit, c.detail.c_str());
                all = all && c.pass;
            }
            return all ? kExitOk : kExitCheckFailed;
        });
    }

    if (*run) {
        return guarded([&] {
            std::vector<std::string> lines;
            const Log keep = make_log(g, &lines);
            RunConfig rc = load(g, config, scenario, keep);
            if (!output.empty()) rc.output_dir = output;
            const auto dir = resolve_output(rc.output_dir);
            const int code = run_one(g, rc, dir, keep);
            std::string text;
            for (const auto& l : lines) text += l + "\n";
            io::write_file(dir / "run.log", text);
            return code;
        });
    }

    if (*sweep) {
        return guarded([&] {
            const RunConfig base = load(g, config, scenario, log);
            const auto parent = resolve_output(output.empty() ? base.output_dir + "_sweep" : output);
            std::vector<std::pair<RunConfig, std::filesystem::path>> jobs;
            for (double v : values) {
                RunConfig rc = base;
                set_param(rc, param, v);
                const std::string tag = param + "_" + fmt(v);
                rc.output_dir = (parent / tag).string();
                jobs.emplace_back(rc, parent / tag);
            }
            const int width = std::max(1, std::min<int>(int(jobs.size()), g.threads > 0 ? g.threads : thread_count()));
            int worst = kExitOk;
            for (std::size_t k = 0; k < jobs.size(); k += std::size_t(width)) {
                std::vector<std::future<int>> batch;
                for (std::size_t j = k; j < std::min(jobs.size(), k + std::size_t(width)); ++j)
                    batch.push_back(std::async(std::launch::async, [&, j] {
                        set_thread_count(1);
                        return guarded([&] { return run_one(g, jobs[j].first, jobs[j].second, log); });
                    }));
                for (auto& f : batch) worst = std::max(worst, f.get());
            }
            return worst;
        });
    }
    return kExitOk;
}
