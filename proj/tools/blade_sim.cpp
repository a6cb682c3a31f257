#include "blade/scenario/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

using namespace blade;

namespace
{
    struct Overrides
    {
        std::optional<std::uint64_t> seed;
        std::optional<std::string> deadline;
    };

    scenario::ScenarioConfig load(const std::string &path, const Overrides &ov)
    {
        auto config = scenario::load_config(path);
        if (ov.seed)
        {
            config.workload.seed = *ov.seed;
        }
        if (ov.deadline)
        {
            config.deadline = scenario::parse_duration(*ov.deadline, "--deadline");
        }
        scenario::validate(config);
        return config;
    }

    void finish(const scenario::ScenarioConfig &config, const std::vector<scenario::RunResult> &runs,
                const std::string &out)
    {
        std::vector<metrics::ConfigSummary> rows;
        for (const auto &r : runs)
        {
            rows.push_back(r.summary);
        }
        std::cout << metrics::render_table(rows);
        if (!out.empty())
        {
            for (const auto &p : scenario::write_reports(out, config, runs))
            {
                std::cerr << "wrote " << p.string() << '\n';
            }
        }
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Discrete-event simulator for coordinated garbage collection in clusters"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string mode_text;
    Overrides ov;

    auto *run = app.add_subcommand("run", "Simulate one scenario");
    run->add_option("config", config_path, "Scenario file (YAML)")->required()->check(CLI::ExistingFile);
    run->add_option("--mode", mode_text, "Collector mode: on, off or blade (overrides the file)")
        ->check(CLI::IsMember({"on", "off", "blade", "gc-on", "gc-off"}));
    run->add_option("--seed", ov.seed, "Workload and simulation seed");
    run->add_option("--out", out_dir, "Directory for summary.csv, CDFs and the effective config");
    run->add_option("--deadline", ov.deadline, "Simulated time to stop at, e.g. 90s");

    bool serial = false;
    auto *compare = app.add_subcommand("compare", "Run GC-On, GC-Off and Blade on the same workload");
    compare->add_option("config", config_path, "Scenario file (YAML)")->required()->check(CLI::ExistingFile);
    compare->add_option("--out", out_dir, "Directory for summary.csv, CDFs and the effective config");
    compare->add_option("--seed", ov.seed, "Workload and simulation seed");
    compare->add_option("--deadline", ov.deadline, "Simulated time to stop at, e.g. 90s");
    compare->add_flag("--serial", serial, "Run the three simulations one after another");

    auto *show = app.add_subcommand("config", "Print the scenario with every default filled in");
    show->add_option("config", config_path, "Scenario file (YAML)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try
    {
        auto config = load(config_path, ov);
        if (*show)
        {
            std::cout << scenario::serialize_config(config);
            return 0;
        }
        if (*run)
        {
            if (!mode_text.empty())
            {
                config.mode = *runtime::parse_gc_mode(mode_text);
            }
            finish(config, {scenario::run_scenario(config)}, out_dir);
            return 0;
        }
        finish(config, scenario::run_compare(config, !serial), out_dir);
        return 0;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
