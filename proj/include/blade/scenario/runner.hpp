#pragma once

#include "blade/metrics/report.hpp"
#include "blade/scenario/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace blade::scenario
{
    struct RunResult
    {
        GcMode mode = GcMode::Blade;
        std::vector<metrics::LatencySample> samples;
        std::vector<metrics::PauseInterval> pauses;
        metrics::ConfigSummary summary;
        std::uint64_t events = 0;
    };

    /// One simulation of `config` with its gc_mode replaced by `mode`.
    RunResult run_scenario(const ScenarioConfig &config, GcMode mode);
    inline RunResult run_scenario(const ScenarioConfig &config) { return run_scenario(config, config.mode); }

    /// GC-On, GC-Off and Blade over the same seed and arrival stream, in that order.
    std::vector<RunResult> run_compare(const ScenarioConfig &config, bool parallel = true);

    /// summary.csv, cdf_<mode>.txt per run, and the effective config.
    std::vector<std::filesystem::path> write_reports(const std::filesystem::path &dir, const ScenarioConfig &config,
                                                     const std::vector<RunResult> &runs);
}
