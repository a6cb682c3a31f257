#pragma once

#include "blade/metrics/overlap.hpp"
#include "blade/metrics/percentiles.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace blade::metrics
{
    /// Everything a single configuration contributes to the comparison table.
    struct ConfigSummary
    {
        std::string name;
        PercentileReport latency;
        std::size_t collections = 0;
        double avg_pause_ms = 0.0;
        OverlapStat overlap;
        std::size_t in_flight_at_deadline = 0;
    };

    ConfigSummary summarize(std::string name, std::span<const LatencySample> samples,
                            std::span<const PauseInterval> pauses, std::size_t in_flight);

    /// Comma-separated table, times in milliseconds with three decimals.
    std::string render_table(std::span<const ConfigSummary> rows);

    /// "latency_ms cumulative_fraction" per sample rank, ascending.
    std::string render_cdf(std::span<const LatencySample> samples);

    /// Writes summary.csv plus cdf_<name>.txt per configuration into dir (created
    /// if missing). Throws std::runtime_error when the directory is unwritable.
    struct NamedRun
    {
        ConfigSummary summary;
        const std::vector<LatencySample> *samples = nullptr;
    };
    std::vector<std::filesystem::path> emit_report(const std::filesystem::path &dir,
                                                   std::span<const NamedRun> runs);
}
